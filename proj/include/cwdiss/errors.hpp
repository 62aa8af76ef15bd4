/*
   Copyright 2026 The cwdiss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cwdiss {

enum class Errc {
  EmptyGrid,
  InadmissibleGamma,
  InvalidInit,
  InvalidConfig,
  StepSizeUnderflow,
  NewtonNoConvergence,
  NoReturn,
  DegenerateGamma,
  WindowEmpty,
  RegimeMismatch,
  NonPositiveK0,
  TooFewPoints,
  UnboundedSup,
  ZeroHits,
};

inline constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::InadmissibleGamma: return "InadmissibleGamma";
    case Errc::InvalidInit: return "InvalidInit";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::StepSizeUnderflow: return "StepSizeUnderflow";
    case Errc::NewtonNoConvergence: return "NewtonNoConvergence";
    case Errc::NoReturn: return "NoReturn";
    case Errc::DegenerateGamma: return "DegenerateGamma";
    case Errc::WindowEmpty: return "WindowEmpty";
    case Errc::RegimeMismatch: return "RegimeMismatch";
    case Errc::NonPositiveK0: return "NonPositiveK0";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::UnboundedSup: return "UnboundedSup";
    case Errc::ZeroHits: return "ZeroHits";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cwdiss
