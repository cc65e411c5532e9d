// Copyright 2026 The EigenSim Authors.
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

#ifndef EIGENSIM_CSV_H_
#define EIGENSIM_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace eigensim {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

// Splits on a single-character or multi-character separator. Empty fields
// are preserved.
std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep);

double parse_double(std::string_view field);
unsigned long long parse_unsigned(std::string_view field);

std::string_view trim(std::string_view s);

// Reads a whole file; throws IoError mentioning the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace eigensim

#endif  // EIGENSIM_CSV_H_
