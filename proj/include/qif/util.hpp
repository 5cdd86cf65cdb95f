// Copyright 2026 The QIF Toolkit Authors
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

#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace qif {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

/// printf-style "%.<digits>g" with negative zero printed as 0.
std::string format_number(double v, int digits = 12);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

/// FNV-1a 64-bit, used for config fingerprints in result metadata.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

/// SplitMix64 finalizer; maps (seed, stream) pairs to well-mixed seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work items are
/// claimed dynamically; callers must write results by index so the outcome
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Worker count to use when the caller passes 0.
int default_threads();

}  // namespace qif
