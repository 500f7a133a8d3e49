// Command-line front end: static rate sweeps, envelope construction,
// allocation solves and fixed-vs-allocated comparisons, as CSV or
// key = value text. All randomness comes from the configured seed, so a
// given config always reproduces the same bytes.

#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hdrc/allocation.hpp"
#include "hdrc/config.hpp"
#include "hdrc/envelope.hpp"
#include "hdrc/oracle.hpp"
#include "hdrc/rates.hpp"

namespace {

using namespace hdrc;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Option values arrive as strings and flow through the same apply_key
/// path as config-file lines, so validation and error wording match.
struct KeyedFlags {
    std::deque<std::pair<std::string, std::string>> holders;  // stable addresses

    void attach(CLI::App* cmd) {
        static const char* keys[] = {
            "p1_bar",          "p2_bar",          "fading.a31.kind", "fading.a31.param",
            "fading.a21.kind", "fading.a21.param", "fading.a32.kind", "fading.a32.param",
            "integrator.kind", "integrator.samples", "integrator.seed", "grid.s2_max",
            "grid.points",     "protocol"};
        for (const char* key : keys) {
            auto& holder = holders.emplace_back(key, std::string());
            std::string flag = "--" + std::string(key);
            for (auto& c : flag)
                if (c == '.' || c == '_') c = '-';
            cmd->add_option(flag, holder.second, std::string("config key ") + key);
        }
    }

    void apply(RunConfig& cfg) const {
        for (const auto& [key, value] : holders)
            if (!value.empty()) apply_key(cfg, key, value);
    }
};

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    KeyedFlags flags;
};

RunConfig make_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) load_config_file(cfg, args.config_path);
    args.flags.apply(cfg);
    validate(cfg);
    return cfg;
}

void emit(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    const std::string tmp = args.out_path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file '" + tmp + "'");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
    }
    if (std::rename(tmp.c_str(), args.out_path.c_str()) != 0)
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + args.out_path + "'");
}

/// (s1, t) of the static channel; needs fixed a31/a21 amplitudes.
std::pair<double, double> static_point(const RunConfig& cfg) {
    if (cfg.fading.a31.kind != FadingKind::fixed)
        throw config_error("fading.a31.kind", "this command needs a fixed a31 amplitude");
    if (cfg.fading.a21.kind != FadingKind::fixed)
        throw config_error("fading.a21.kind", "this command needs a fixed a21 amplitude");
    if (!(cfg.fading.a31.param > 0.0))
        throw config_error("fading.a31.param", "must be positive to define s1 and t");
    const double s1 = cfg.fading.a31.param * cfg.fading.a31.param * cfg.budget.p1_bar;
    const double ratio = cfg.fading.a21.param / cfg.fading.a31.param;
    return {s1, ratio * ratio};
}

int cmd_rates(const CommonArgs& args) {
    const RunConfig cfg = make_config(args);
    const auto [s1, t] = static_point(cfg);
    const EnvelopeGeometry geom = build_envelope(s1, t);
    std::string out = "s2,rate_df,rate_cf,rate_hybrid,rate_envelope,d_df_left,d_df_right,d_cf\n";
    for (int i = 0; i < cfg.grid_points; ++i) {
        const double s2 =
            cfg.grid_s2_max * static_cast<double>(i) / static_cast<double>(cfg.grid_points - 1);
        const SnrState st{s1, t, s2};
        out += fmt(s2) + ',' + fmt(rate_df(st)) + ',' + fmt(rate_cf(st)) + ',' +
               fmt(rate_hybrid(st)) + ',' + fmt(envelope_rate(s2, geom)) + ',' +
               fmt(rate_df_slope(st, Side::left)) + ',' + fmt(rate_df_slope(st, Side::right)) +
               ',' + fmt(rate_cf_slope(st)) + '\n';
    }
    emit(args, out);
    return 0;
}

int cmd_envelope(const CommonArgs& args, bool curve) {
    const RunConfig cfg = make_config(args);
    const auto [s1, t] = static_point(cfg);
    if (!(t > 0.0)) throw config_error("fading.a21.param", "must be positive (t > 0)");
    const EnvelopeGeometry geom = build_envelope(s1, t);
    std::string out;
    if (geom.degenerate) {
        out += "degenerate: CF dominates\n";
    } else {
        out += "s_d = " + fmt(geom.s_d) + '\n';
        out += "s_c = " + fmt(geom.s_c) + '\n';
        out += "k = " + fmt(geom.k) + '\n';
        out += "degenerate = false\n";
    }
    if (curve) {
        out += "s2,rate_envelope,piece\n";
        for (int i = 0; i < cfg.grid_points; ++i) {
            const double s2 = cfg.grid_s2_max * static_cast<double>(i) /
                              static_cast<double>(cfg.grid_points - 1);
            const char* piece = geom.degenerate         ? "cf"
                                : (s2 <= geom.s_d)      ? "df"
                                : (s2 >= geom.s_c)      ? "cf"
                                                        : "bridge";
            out += fmt(s2) + ',' + fmt(envelope_rate(s2, geom)) + ',' + piece + '\n';
        }
    }
    emit(args, out);
    return 0;
}

std::vector<Protocol> selected_protocols(const RunConfig& cfg) {
    switch (cfg.protocol) {
        case ProtocolChoice::df: return {Protocol::df};
        case ProtocolChoice::cf: return {Protocol::cf};
        case ProtocolChoice::hybrid: return {Protocol::hybrid};
        case ProtocolChoice::all: return {Protocol::df, Protocol::cf, Protocol::hybrid};
    }
    return {};
}

int cmd_allocate(const CommonArgs& args, bool dump_states) {
    const RunConfig cfg = make_config(args);
    std::string out;
    std::string dump = "protocol,a31,a21,a32,weight,s2_star,p2_star\n";
    EnvelopeCache cache;
    for (Protocol protocol : selected_protocols(cfg)) {
        const AllocationPolicy policy =
            solve_mu(protocol, cfg.budget, cfg.fading, cfg.integrator, cache);
        const RateEstimate rate = average_rate(policy, cfg.integrator, cache);
        out += std::string("protocol = ") + protocol_name(protocol) + '\n';
        out += "mu_star = " + fmt(policy.mu_star) + '\n';
        out += "e_p2 = " + fmt(policy.achieved_relay_power) + '\n';
        out += "avg_rate = " + fmt(rate.value) + '\n';
        out += std::string("saturated = ") + (policy.saturated ? "true" : "false") + '\n';

        if (dump_states) {
            const auto row = [&](const ChannelRealization& h, double w) {
                const StateAllocation a =
                    allocate_state(h, policy.mu_star, protocol, cfg.budget, cache);
                dump += std::string(protocol_name(protocol)) + ',' + fmt(h.a31) + ',' +
                        fmt(h.a21) + ',' + fmt(h.a32) + ',' + fmt(w) + ',' + fmt(a.s2) + ',' +
                        fmt(a.p2) + '\n';
            };
            if (cfg.integrator.kind == IntegratorSpec::Kind::monte_carlo) {
                std::mt19937_64 rng(cfg.integrator.seed);
                for (int i = 0; i < cfg.integrator.samples; ++i)
                    row(sample_realization(cfg.fading, rng), 1.0 / cfg.integrator.samples);
            } else {
                const int nodes = std::max(2, cfg.integrator.samples);
                for (const auto& [x31, w31] : link_atoms(cfg.fading.a31, nodes))
                    for (const auto& [x21, w21] : link_atoms(cfg.fading.a21, nodes))
                        for (const auto& [x32, w32] : link_atoms(cfg.fading.a32, nodes))
                            row({x31, x21, x32}, w31 * w21 * w32);
            }
        }
    }
    if (dump_states) out += dump;
    emit(args, out);
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const RunConfig cfg = make_config(args);
    if (cfg.protocol != ProtocolChoice::all)
        throw config_error("protocol", "simulate compares all protocols; use protocol = all");
    std::string out = "protocol,mode,avg_rate,e_p2,gain\n";
    EnvelopeCache cache;
    for (Protocol protocol : {Protocol::df, Protocol::cf, Protocol::hybrid}) {
        const Estimate fixed = fixed_power_baseline(cfg.budget, cfg.fading, protocol, cfg.integrator);
        const AllocationPolicy policy =
            solve_mu(protocol, cfg.budget, cfg.fading, cfg.integrator, cache);
        const RateEstimate alloc = average_rate(policy, cfg.integrator, cache);
        out += std::string(protocol_name(protocol)) + ",fixed," + fmt(fixed.value) + ',' +
               fmt(cfg.budget.p2_bar) + ',' + fmt(0.0) + '\n';
        out += std::string(protocol_name(protocol)) + ",allocated," + fmt(alloc.value) + ',' +
               fmt(policy.achieved_relay_power) + ',' + fmt(alloc.value - fixed.value) + '\n';
    }
    emit(args, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Half-duplex relay power allocation: DF, CF and hybrid protocols"};
    app.require_subcommand(1);

    CommonArgs rates_args, envelope_args, allocate_args, simulate_args;
    bool curve = false, dump_states = false;

    const auto common = [](CLI::App* cmd, CommonArgs& args) {
        cmd->add_option("--config", args.config_path, "key = value config file");
        cmd->add_option("--out", args.out_path, "write output to this file (atomic)");
        args.flags.attach(cmd);
    };

    CLI::App* rates = app.add_subcommand("rates", "static rate and slope sweep over s2 (CSV)");
    common(rates, rates_args);
    CLI::App* envelope = app.add_subcommand("envelope", "concave envelope geometry for (s1, t)");
    common(envelope, envelope_args);
    envelope->add_flag("--curve", curve, "also emit the three-piece curve as CSV");
    CLI::App* allocate = app.add_subcommand("allocate", "solve the relay power allocation");
    common(allocate, allocate_args);
    allocate->add_flag("--dump-states", dump_states, "append per-state allocations as CSV");
    CLI::App* simulate =
        app.add_subcommand("simulate", "fixed-power vs allocated comparison table (CSV)");
    common(simulate, simulate_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (rates->parsed()) return cmd_rates(rates_args);
        if (envelope->parsed()) return cmd_envelope(envelope_args, curve);
        if (allocate->parsed()) return cmd_allocate(allocate_args, dump_states);
        if (simulate->parsed()) return cmd_simulate(simulate_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
