// Copyright 2026 The pcl-srtool Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PCL_SR_ERROR_H_
#define PCL_SR_ERROR_H_

#include <stdexcept>
#include <string>

namespace pcl_sr {

enum class ErrorCode {
  kInvalidArgument,  // precondition on a scalar argument
  kShapeMismatch,    // operands of different dimensions
  kTooSmall,         // image/corpus smaller than an operation requires
  kFileNotFound,
  kUnsupportedFormat,
  kDecodeFailure,
  kIoFailure,
  kParseFailure,    // malformed model / sidecar text
  kNumericFailure,  // non-finite values, singular matrices, diverged loss
};

const char* ErrorCodeName(ErrorCode code);

// Every library failure is reported as an Error carrying a machine-readable
// code; callers (the CLI in particular) map codes onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pcl_sr

#endif  // PCL_SR_ERROR_H_
