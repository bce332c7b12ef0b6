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

#ifndef GEOPERC_CLI_H_
#define GEOPERC_CLI_H_

#include <iosfwd>

namespace geoperc {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitIo = 3;

// Entry point for `geoperc <build|query|zoom|synth|inspect|serve> ...`.
// Diagnostics go to `err` as one line starting with "error[<code>]:".
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace geoperc

#endif  // GEOPERC_CLI_H_
