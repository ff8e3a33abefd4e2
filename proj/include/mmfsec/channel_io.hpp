// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMFSEC_CHANNEL_IO_HPP
#define MMFSEC_CHANNEL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "mmfsec/channel.hpp"

namespace mmfsec {

// Channel file format (JSON):
//   { "n": <int>, "label": <string, optional>, "entries": [[re, im], ...] }
// with n*n entries in row-major order.  Doubles are written in shortest
// round-trip form, so load -> save reproduces a canonical file byte for byte.

ChannelMatrix<double> parse_channel(std::string_view json_text);
ChannelMatrix<double> load_channel(const std::filesystem::path &path);

std::string serialize_channel(const ChannelMatrix<double> &channel);
void save_channel(const ChannelMatrix<double> &channel, const std::filesystem::path &path);

/// FNV-1a of the canonical serialisation.
std::uint64_t channel_digest(const ChannelMatrix<double> &channel);

} // namespace mmfsec

#endif
