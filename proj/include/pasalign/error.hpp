// Copyright 2026 The pasalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pasalign {

/// Raised for any malformed input: bad indices, non-finite values, schema
/// violations, inconsistent dimensions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by de-contextualized rescoring when the phrase store lacks one or
/// more aligned span surfaces. `phrases()` lists every missing surface once,
/// in first-seen order.
class MissingPhraseError : public std::runtime_error {
 public:
  explicit MissingPhraseError(std::vector<std::string> phrases)
      : std::runtime_error(describe(phrases)), phrases_(std::move(phrases)) {}

  const std::vector<std::string>& phrases() const noexcept { return phrases_; }

 private:
  static std::string describe(const std::vector<std::string>& phrases) {
    std::string msg = "phrase store is missing " +
                      std::to_string(phrases.size()) + " phrase(s)";
    for (const auto& p : phrases) msg += "\n  " + p;
    return msg;
  }

  std::vector<std::string> phrases_;
};

}  // namespace pasalign
