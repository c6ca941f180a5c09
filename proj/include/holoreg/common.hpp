// Copyright 2026 The holoreg Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace holoreg {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using SparseOp = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. Everything thrown by the library derives from Error so
// front-ends can catch one type and report the category name.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* category() const noexcept { return "error"; }
};

#define HOLOREG_ERROR(Name, label)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(what) {}          \
    const char* category() const noexcept override { return label; } \
  };

HOLOREG_ERROR(InvalidArgument, "invalid-argument")
HOLOREG_ERROR(UnreachableAngle, "unreachable-angle")
HOLOREG_ERROR(RegisterConstructionError, "register-construction")
HOLOREG_ERROR(CapacityError, "capacity")
HOLOREG_ERROR(IntegrationError, "integration")
HOLOREG_ERROR(FitError, "fit")
HOLOREG_ERROR(AdiabaticityContractError, "adiabaticity-contract")
HOLOREG_ERROR(SequencingError, "sequencing")
HOLOREG_ERROR(CompileError, "compile")
HOLOREG_ERROR(ConfigError, "config")

#undef HOLOREG_ERROR

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace holoreg
