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

#include "pcl_sr/error.h"

namespace pcl_sr {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kShapeMismatch:
      return "shape mismatch";
    case ErrorCode::kTooSmall:
      return "input too small";
    case ErrorCode::kFileNotFound:
      return "file not found";
    case ErrorCode::kUnsupportedFormat:
      return "unsupported format";
    case ErrorCode::kDecodeFailure:
      return "decode failure";
    case ErrorCode::kIoFailure:
      return "I/O failure";
    case ErrorCode::kParseFailure:
      return "parse failure";
    case ErrorCode::kNumericFailure:
      return "numeric failure";
  }
  return "unknown error";
}

}  // namespace pcl_sr
