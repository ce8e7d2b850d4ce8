// Copyright 2026 The mind Authors. All rights reserved.
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

#include <iosfwd>
#include <string>
#include <vector>

namespace mind::cli {

// Parses argv (argv[0] is the program name) and runs one subcommand.
// Returns the process exit code: 0 ok, 2 usage, 3 data, 4 backend. Errors
// go to err as one JSON object {"error":..., "message":...}.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// Same, with args not including the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mind::cli
