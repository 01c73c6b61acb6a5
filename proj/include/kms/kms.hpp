#pragma once

#include <kms/config.hpp>
#include <kms/discretization.hpp>
#include <kms/error.hpp>
#include <kms/fixed_point.hpp>
#include <kms/linear_solvers.hpp>
#include <kms/local_solver.hpp>
#include <kms/model.hpp>
#include <kms/pipeline.hpp>
#include <kms/report.hpp>
#include <kms/spectral.hpp>

namespace kms {

inline constexpr const char* version = "1.0.0";

}  // namespace kms
