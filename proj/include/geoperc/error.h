// Copyright 2026 The geoperc Authors.
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

#ifndef GEOPERC_ERROR_H_
#define GEOPERC_ERROR_H_

#include <stdexcept>
#include <string>

namespace geoperc {

// Broad failure classes. The CLI maps these onto exit codes and the
// service onto HTTP statuses.
enum class ErrorKind {
  kInvalidArgument,
  kData,
  kIo,
};

// All library errors carry a short machine-readable code such as
// "empty-corpus" or "corrupt-table" next to the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string &message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string &code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

inline Error InvalidArgument(const std::string &message) {
  return Error(ErrorKind::kInvalidArgument, "invalid-argument", message);
}

inline Error DataError(std::string code, const std::string &message) {
  return Error(ErrorKind::kData, std::move(code), message);
}

inline Error IoError(std::string code, const std::string &message) {
  return Error(ErrorKind::kIo, std::move(code), message);
}

}  // namespace geoperc

#endif  // GEOPERC_ERROR_H_
