// Copyright 2026 The ELG Authors.
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


// Small string and hashing helpers shared across modules.

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace elg {

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with(std::string_view text, std::string_view prefix);

// Parses a whole field as an integer; false on any trailing garbage.
bool parse_int(std::string_view field, long long& out);
bool parse_double(std::string_view field, double& out);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// 64-bit FNV-1a. Stable across platforms; used for artifact checksums.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

// Derives an independent seed for stream `salt` (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace elg
