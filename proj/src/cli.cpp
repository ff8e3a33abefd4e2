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

#include "mmfsec/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmfsec/channel_io.hpp"
#include "mmfsec/format.hpp"
#include "mmfsec/montecarlo.hpp"
#include "mmfsec/report.hpp"

namespace mmfsec {

namespace {

std::string join_args(const std::vector<std::string> &args)
{
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ' ';
        out += args[i];
    }
    return out;
}

void write_text(const std::string &path, const std::string &text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush())
        throw IoError("write to '" + path + "' failed");
}

/// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string &path, const std::string &text, std::ostream &fallback)
{
    if (path.empty())
        fallback << text;
    else
        write_text(path, text);
}

struct GenChannelOptions {
    std::int64_t modes = 55;
    double spread_db = 20.0;
    std::uint64_t seed = 1;
    std::string label;
    std::string output;
    std::string manifest;
};

struct SweepOptions {
    std::string channel;
    std::string snr = "-5:15:5";
    std::int64_t trials = 20000;
    std::string schemes = "greedy-an,waterfilling";
    std::uint64_t seed = 1;
    double mdl_db = 20.0;
    double power = 1.0;
    double tau_step = 0.05;
    std::int64_t eve_draws = 200;
    std::int64_t gram_draws = 0;
    bool no_normalize = false;
    bool share_draws = false;
    unsigned threads = 0;
    std::string dump_trials;
    std::string manifest;
    std::string output;
};

struct SurfaceOptions {
    std::string channel;
    double snr_db = 5.0;
    std::uint64_t seed = 1;
    double mdl_db = 20.0;
    double power = 1.0;
    double tau_step = 0.05;
    std::int64_t eve_draws = 200;
    bool no_normalize = false;
    std::string manifest;
    std::string output;
};

int cmd_gen_channel(const GenChannelOptions &o, const std::string &command, std::ostream &, std::ostream &err)
{
    if (o.modes < 1)
        throw ConfigError("--modes must be >= 1");
    SeededRng rng(o.seed);
    auto h = gen_synthetic_channel<double>(o.modes, o.spread_db, rng);
    if (!o.label.empty())
        h = ChannelMatrix<double>(h.entries(), o.label);
    save_channel(h, o.output);

    nlohmann::ordered_json cfg;
    cfg["modes"] = o.modes;
    cfg["spread_db"] = o.spread_db;
    cfg["seed"] = o.seed;
    cfg["output"] = o.output;
    RunManifest m{command, std::string(kToolVersion), o.seed, hex64(channel_digest(h)), utc_timestamp(),
                  cfg.dump()};
    emit(o.manifest, m.to_json(), err);
    return kExitOk;
}

int cmd_sweep(const SweepOptions &o, const std::string &command, std::ostream &out, std::ostream &err)
{
    SweepConfig cfg;
    cfg.snr_db_points = parse_snr_range(o.snr);
    cfg.schemes = parse_scheme_list(o.schemes);
    cfg.trials = o.trials;
    cfg.master_seed = o.seed;
    cfg.profile.mdl_db = o.mdl_db;
    cfg.profile.normalize_trace = !o.no_normalize;
    cfg.power = o.power;
    cfg.tau_grid_step = o.tau_step;
    cfg.eve_draws = o.eve_draws;
    cfg.gram_draws = o.gram_draws;
    cfg.share_draws_across_snr = o.share_draws;
    cfg.threads = o.threads;
    cfg.keep_trials = !o.dump_trials.empty();
    cfg.validate();

    const auto h = load_channel(o.channel);
    if (cfg.profile.mdl_db > 0.0 && h.n() < 2)
        throw ConfigError("a non-zero MDL needs at least two modes");
    const auto result = run_sweep(h, cfg);

    std::ostringstream csv;
    write_stats_csv(csv, result.stats, cfg.master_seed);
    emit(o.output, csv.str(), out);
    if (!o.dump_trials.empty()) {
        std::ostringstream dump;
        write_trials_csv(dump, result.trials);
        write_text(o.dump_trials, dump.str());
    }

    RunManifest m{command, std::string(kToolVersion), cfg.master_seed, hex64(channel_digest(h)), utc_timestamp(),
                  sweep_config_json(cfg)};
    emit(o.manifest, m.to_json(), err);
    return kExitOk;
}

int cmd_inspect(const std::string &path, std::ostream &out)
{
    const auto h = load_channel(path);
    const auto &sv = h.singular_values();
    const Index n = h.n();
    out << "n: " << n << '\n';
    if (h.label())
        out << "label: " << *h.label() << '\n';
    out << "singular_values:";
    for (Index i = 0; i < n; ++i)
        out << ' ' << format_double(sv(i));
    out << '\n';
    const double lo = sv(n - 1) * sv(n - 1);
    const double hi = sv(0) * sv(0);
    char buf[64];
    if (lo > 0.0)
        std::snprintf(buf, sizeof(buf), "%.4f", 10.0 * std::log10(hi / lo));
    else
        std::snprintf(buf, sizeof(buf), "inf");
    out << "gain_range_db: " << buf << '\n';
    out << "trace: " << format_double(h.gram_trace()) << '\n';
    out << "digest: " << hex64(channel_digest(h)) << '\n';
    return kExitOk;
}

int cmd_surface(const SurfaceOptions &o, const std::string &command, std::ostream &out, std::ostream &err)
{
    MdlProfile profile;
    profile.mdl_db = o.mdl_db;
    profile.normalize_trace = !o.no_normalize;
    if (!(o.power > 0.0) || o.eve_draws < 1 || !(o.tau_step > 0.0 && o.tau_step <= 0.5) ||
        !std::isfinite(o.snr_db) || !(o.mdl_db >= 0.0))
        throw ConfigError("surface: invalid power, eve draws, tau step, SNR or MDL");
    const auto h = load_channel(o.channel);
    std::vector<Index> s_values;
    for (Index s = 1; s <= h.n(); ++s)
        s_values.push_back(s);
    SeededRng rng(o.seed, stream_key({kSearchStreamTag, 0}));
    const NoiseModel<double> noise{noise_variance_for_snr(o.power, o.snr_db)};
    const auto grid =
        unimodality_surface(h, o.power, noise, profile, s_values, tau_grid(o.tau_step), o.eve_draws, rng);

    std::ostringstream csv;
    write_surface_csv(csv, grid);
    emit(o.output, csv.str(), out);

    nlohmann::ordered_json cfg;
    cfg["snr_db"] = o.snr_db;
    cfg["mdl_db"] = o.mdl_db;
    cfg["normalize_trace"] = profile.normalize_trace;
    cfg["power"] = o.power;
    cfg["tau_step"] = o.tau_step;
    cfg["eve_draws"] = o.eve_draws;
    RunManifest m{command, std::string(kToolVersion), o.seed, hex64(channel_digest(h)), utc_timestamp(),
                  cfg.dump()};
    emit(o.manifest, m.to_json(), err);
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Secrecy rates of multi-mode fiber wiretap channels with artificial noise", "mmfsec"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    GenChannelOptions gen;
    auto *gen_cmd = app.add_subcommand("gen-channel", "Write a synthetic channel file");
    gen_cmd->add_option("--modes", gen.modes, "Number of modes")->capture_default_str();
    gen_cmd->add_option("--spread-db", gen.spread_db, "Singular-value power range in dB")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    gen_cmd->add_option("--label", gen.label, "Label stored in the file");
    gen_cmd->add_option("-o,--output", gen.output, "Output path")->required();
    gen_cmd->add_option("--manifest", gen.manifest, "Manifest path (default: stderr)");

    SweepOptions sw;
    auto *sweep_cmd = app.add_subcommand("sweep", "Monte Carlo SNR sweep, CSV output");
    sweep_cmd->add_option("--channel", sw.channel, "Channel file")->required();
    sweep_cmd->add_option("--snr", sw.snr, "SNR range start:stop:step in dB")->capture_default_str();
    sweep_cmd->add_option("--trials", sw.trials, "Eve realisations per SNR point")->capture_default_str();
    sweep_cmd->add_option("--schemes", sw.schemes,
                          "Comma list of waterfilling, svd-uniform, greedy-an, jensen-bound, lemma-bounds")
        ->capture_default_str();
    sweep_cmd->add_option("--seed", sw.seed, "Master seed")->capture_default_str();
    sweep_cmd->add_option("--mdl-db", sw.mdl_db, "Mode-dependent loss in dB")->capture_default_str();
    sweep_cmd->add_option("--power", sw.power, "Total transmit power P")->capture_default_str();
    sweep_cmd->add_option("--tau-step", sw.tau_step, "Grid step of the signal fraction")->capture_default_str();
    sweep_cmd->add_option("--eve-draws", sw.eve_draws, "Frozen Eve draws for the greedy search")
        ->capture_default_str();
    sweep_cmd->add_option("--gram-draws", sw.gram_draws, "Draws for the E[G^H G] cross-check")
        ->capture_default_str();
    sweep_cmd->add_flag("--no-normalize-trace", sw.no_normalize, "Do not rescale Eve to Bob's total power");
    sweep_cmd->add_flag("--share-draws", sw.share_draws, "Reuse the same Eve draws at every SNR point");
    sweep_cmd->add_option("--threads", sw.threads, "Worker threads, 0 = all cores")->capture_default_str();
    sweep_cmd->add_option("--dump-trials", sw.dump_trials, "Per-realisation CSV path");
    sweep_cmd->add_option("--manifest", sw.manifest, "Manifest path (default: stderr)");
    sweep_cmd->add_option("-o,--output", sw.output, "CSV path (default: stdout)");

    std::string inspect_path;
    auto *inspect_cmd = app.add_subcommand("inspect", "Report singular values and digest of a channel file");
    inspect_cmd->add_option("--channel,channel", inspect_path, "Channel file")->required();

    SurfaceOptions sf;
    auto *surface_cmd = app.add_subcommand("surface", "Mean secrecy rate over the (S, tau) grid");
    surface_cmd->add_option("--channel", sf.channel, "Channel file")->required();
    surface_cmd->add_option("--snr", sf.snr_db, "SNR in dB")->capture_default_str();
    surface_cmd->add_option("--seed", sf.seed, "Master seed")->capture_default_str();
    surface_cmd->add_option("--mdl-db", sf.mdl_db, "Mode-dependent loss in dB")->capture_default_str();
    surface_cmd->add_option("--power", sf.power, "Total transmit power P")->capture_default_str();
    surface_cmd->add_option("--tau-step", sf.tau_step, "Grid step of the signal fraction")->capture_default_str();
    surface_cmd->add_option("--eve-draws", sf.eve_draws, "Frozen Eve draws")->capture_default_str();
    surface_cmd->add_flag("--no-normalize-trace", sf.no_normalize, "Do not rescale Eve to Bob's total power");
    surface_cmd->add_option("--manifest", sf.manifest, "Manifest path (default: stderr)");
    surface_cmd->add_option("-o,--output", sf.output, "CSV path (default: stdout)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty())
        rev.pop_back(); // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const std::string command = join_args(args);
    try {
        if (*gen_cmd)
            return cmd_gen_channel(gen, command, out, err);
        if (*sweep_cmd)
            return cmd_sweep(sw, command, out, err);
        if (*inspect_cmd)
            return cmd_inspect(inspect_path, out);
        if (*surface_cmd)
            return cmd_surface(sf, command, out, err);
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitUsage;
}

} // namespace mmfsec
