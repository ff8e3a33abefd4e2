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

#include "mmfsec/channel_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmfsec/format.hpp"

namespace mmfsec {

std::string hex64(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

ChannelMatrix<double> parse_channel(std::string_view json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError("<document>", e.what());
    }
    if (!doc.is_object())
        throw ParseError("<document>", "expected a JSON object");

    const auto n_it = doc.find("n");
    if (n_it == doc.end())
        throw ParseError("n", "missing");
    if (!n_it->is_number_integer())
        throw ParseError("n", "expected an integer");
    const auto n = n_it->get<std::int64_t>();
    if (n < 1)
        throw ParseError("n", "must be >= 1");

    const auto e_it = doc.find("entries");
    if (e_it == doc.end())
        throw ParseError("entries", "missing");
    if (!e_it->is_array())
        throw ParseError("entries", "expected an array of [re, im] pairs");
    const auto &entries = *e_it;
    if (static_cast<std::int64_t>(entries.size()) != n * n)
        throw DimensionError("entries: expected n*n = " + std::to_string(n * n) +
                             " values, got " + std::to_string(entries.size()));

    std::optional<std::string> label;
    if (const auto l_it = doc.find("label"); l_it != doc.end()) {
        if (!l_it->is_string())
            throw ParseError("label", "expected a string");
        label = l_it->get<std::string>();
    }

    CMatrixXd m(n, n);
    for (std::int64_t k = 0; k < n * n; ++k) {
        const auto &pair = entries[static_cast<std::size_t>(k)];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw ParseError("entries[" + std::to_string(k) + "]", "expected [re, im]");
        m(k / n, k % n) = {pair[0].get<double>(), pair[1].get<double>()};
    }
    return ChannelMatrix<double>(std::move(m), std::move(label));
}

ChannelMatrix<double> load_channel(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open channel file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_channel(buf.str());
}

std::string serialize_channel(const ChannelMatrix<double> &channel)
{
    const auto &m = channel.entries();
    const Index n = channel.n();
    std::string out = "{\n  \"n\": " + std::to_string(n) + ",\n";
    if (channel.label())
        out += "  \"label\": " + nlohmann::json(*channel.label()).dump() + ",\n";
    out += "  \"entries\": [\n";
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const auto z = m(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw DomainError("channel entries must be finite to serialise");
            out += "    [" + format_double(z.real()) + ", " + format_double(z.imag()) + "]";
            out += (i == n - 1 && j == n - 1) ? "\n" : ",\n";
        }
    }
    out += "  ]\n}\n";
    return out;
}

void save_channel(const ChannelMatrix<double> &channel, const std::filesystem::path &path)
{
    const std::string text = serialize_channel(channel);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out.flush())
        throw IoError("write to '" + path.string() + "' failed");
}

std::uint64_t channel_digest(const ChannelMatrix<double> &channel)
{
    return fnv1a64(serialize_channel(channel));
}

} // namespace mmfsec
