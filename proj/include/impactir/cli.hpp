// Copyright 2026 the impactir authors
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

#include <ostream>
#include <string>
#include <vector>

namespace impactir::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one pipeline subcommand: expand, score-bm25, build, search,
/// evaluate, bench or significance. Returns the process exit code; failure
/// diagnostics go to `err` as a single line.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace impactir::cli
