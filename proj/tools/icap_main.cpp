// Command-line front end: channel analysis, decomposition dumps, closed-form
// sweeps, side-information sweeps, and the built-in verification suite.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icap/intrinsic.hpp"
#include "icap/json_io.hpp"
#include "../src/parallel.hpp"

namespace {

using namespace icap;

struct RunConfig {
    double tol = kBaTol;
    long long max_iter = kBaMaxIter;
    long long lp_limit = kLpAtomLimit;
    long long strategy_limit = kStrategyRowLimit;
    std::uint64_t ordering_seed = 0;
    std::string output;
    std::string format;
};

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output);
    if (!out) throw DomainError("cannot open output file: " + cfg.output);
    out << text;
}

Grid parse_grid(const std::string& spec) {
    Grid g;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(spec);
    if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':' || !in.eof())
        throw DomainError("grid must be start:stop:step, got \"" + spec + "\"");
    return g;
}

int cmd_analyze(const RunConfig& cfg, const std::string& path) {
    const Channel w = load_channel(path);
    Json report;
    report["channel"] = to_json(w);
    report["capacity"] = to_json(blahut_arimoto(w, cfg.tol, cfg.max_iter));
    report["rank1_probs"] = to_json(rank1_probs(w));
    const SupportBounds sb = support_bounds(w);
    report["support_bounds"] = Json{{"lower", sb.lower}, {"upper", sb.upper}};
    report["ic11_bounds"] = to_json(ic11_bounds(w));
    try {
        const IcExact lo = ic11_exact(w, Sense::min, cfg.lp_limit);
        const IcExact hi = ic11_exact(w, Sense::max, cfg.lp_limit);
        report["ic11_exact"] = Json{{"min", lo.bits},
                                    {"max", hi.bits},
                                    {"min_witness", to_json(lo.witness)},
                                    {"max_witness", to_json(hi.witness)}};
    } catch (const TooLarge& e) {
        report["ic11_exact"] = Json{{"skipped", e.what()}};
    }
    if (w.n() == 2) report["ic10"] = to_json(ic10_binary_output(w));
    if (w.m() == 2) report["ic01"] = to_json(ic01_binary_input(w));
    emit(cfg, report.dump(2) + "\n");
    return 0;
}

int cmd_decompose(const RunConfig& cfg, const std::string& path,
                  const std::optional<std::pair<int, int>>& birkhoff) {
    const Channel w = load_channel(path);
    Decomposition dec{};
    if (birkhoff) {
        ColumnSumBounds bounds;
        bounds.a = Eigen::VectorXi::Constant(w.n(), birkhoff->first);
        bounds.b = Eigen::VectorXi::Constant(w.n(), birkhoff->second);
        dec = birkhoff_decompose(w, bounds);
    } else {
        const auto ordering = make_ordering(w.m(), w.n(), cfg.ordering_seed);
        dec = greedy_vertex(w, ordering);
    }
    emit(cfg, to_json(dec).dump(2) + "\n");
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& family, double eps1,
              const std::string& grid_spec) {
    const Grid grid = parse_grid(grid_spec);
    const std::vector<double> params = grid.points();
    std::vector<BinaryBinaryReport> rows(params.size());
    detail::parallel_for(params.size(), [&](std::size_t i) {
        const double p = params[i];
        if (family == "bsc")
            rows[i] = binary_binary_report(p, p);
        else if (family == "z")
            rows[i] = binary_binary_report(0.0, p);
        else
            rows[i] = binary_binary_report(eps1, p);
    });
    if (cfg.format == "json") {
        Json out = Json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Json j = to_json(rows[i]);
            j["param"] = params[i];
            out.push_back(std::move(j));
        }
        emit(cfg, out.dump(2) + "\n");
        return 0;
    }
    std::string csv = "param,lower11,lower10,lower01,upper11,upper10,upper01\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const BinaryBinaryReport& r = rows[i];
        csv += csv_number(params[i]) + ',' + csv_number(r.lower11) + ',' + csv_number(r.lower10) +
               ',' + csv_number(r.lower01) + ',' + csv_number(r.upper11) + ',' +
               csv_number(r.upper10) + ',' + csv_number(r.upper01) + '\n';
    }
    emit(cfg, csv);
    return 0;
}

int cmd_si_sweep(const RunConfig& cfg, const std::string& preset, double q,
                 const std::string& grid_spec) {
    if (preset != "paper-fig5")
        throw DomainError("unknown preset: " + preset + " (available: paper-fig5)");
    const StateChannelModel base = paper_fig5_model();
    const auto points = si_sweep(base, q, parse_grid(grid_spec), DegradationRule::bsc_cascade);
    if (cfg.format == "json") {
        Json out = Json::array();
        for (const auto& pt : points) out.push_back(Json{{"p", pt.p}, {"capacity_bits", pt.capacity}});
        emit(cfg, out.dump(2) + "\n");
        return 0;
    }
    std::string csv = "p,capacity_bits\n";
    for (const auto& pt : points) csv += csv_number(pt.p) + ',' + csv_number(pt.capacity) + '\n';
    emit(cfg, csv);
    return 0;
}

// The verification suite pins its own tolerances; --tol does not loosen it.
int cmd_verify_paper(const RunConfig& cfg) {
    VerifyReport report = verify_paper_examples();

    {
        VerifyItem item;
        item.name = "three-input channel extremes by linear programming";
        Mat wm(3, 3);
        wm << 0.3, 0.3, 0.4, 0.2, 0.5, 0.3, 0.4, 0.1, 0.5;
        const Channel w = Channel::validate(wm);
        const double lo = ic11_exact(w, Sense::min).bits;
        const double hi = ic11_exact(w, Sense::max).bits;
        item.values.push_back({"minimum", lo, 0.4, 1e-6, std::abs(lo - 0.4) <= 1e-6});
        const double want_hi = 0.2 + 0.8 * std::log2(3.0);
        item.values.push_back({"maximum", hi, want_hi, 1e-6, std::abs(hi - want_hi) <= 1e-6});
        item.pass = item.values[0].pass && item.values[1].pass;
        report.items.push_back(std::move(item));
    }
    {
        VerifyItem item;
        item.name = "binary symmetric and asymmetric closed forms";
        const BinaryBinaryReport bsc = binary_binary_report(0.25, 0.25);
        const double c_bsc = 1.0 - binary_entropy(0.25);
        item.values.push_back({"bsc lower11", bsc.lower11, 0.5, 1e-12, std::abs(bsc.lower11 - 0.5) <= 1e-12});
        item.values.push_back(
            {"bsc lower10", bsc.lower10, c_bsc, 1e-9, std::abs(bsc.lower10 - c_bsc) <= 1e-9});
        item.values.push_back({"bsc upper11", bsc.upper11, 1.0, 1e-12, std::abs(bsc.upper11 - 1.0) <= 1e-12});
        const BinaryBinaryReport z = binary_binary_report(0.0, 0.3);
        const double c_z = blahut_arimoto(z.channel()).capacity;
        item.values.push_back({"z lower11", z.lower11, 0.7, 1e-12, std::abs(z.lower11 - 0.7) <= 1e-12});
        item.values.push_back({"z upper11", z.upper11, 0.7, 1e-12, std::abs(z.upper11 - 0.7) <= 1e-12});
        item.values.push_back({"z lower10", z.lower10, c_z, 1e-8, std::abs(z.lower10 - c_z) <= 1e-8});
        item.values.push_back({"z upper10", z.upper10, c_z, 1e-8, std::abs(z.upper10 - c_z) <= 1e-8});
        item.pass = true;
        for (const auto& v : item.values) item.pass = item.pass && v.pass;
        report.items.push_back(std::move(item));
    }

    if (cfg.format == "json") {
        emit(cfg, to_json(report).dump(2) + "\n");
    } else {
        std::string text;
        int passed = 0;
        for (const auto& item : report.items) {
            text += std::string(item.pass ? "[PASS] " : "[FAIL] ") + item.name + "\n";
            if (item.pass) {
                ++passed;
            } else {
                for (const auto& v : item.values)
                    if (!v.pass)
                        text += "       " + v.name + ": observed " + csv_number(v.observed) +
                                ", expected " + csv_number(v.expected) + " +/- " +
                                csv_number(v.tolerance) + "\n";
            }
        }
        text += std::to_string(passed) + "/" + std::to_string(report.items.size()) +
                " verification items passed\n";
        emit(cfg, text);
    }
    return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lower and upper intrinsic capacities of discrete memoryless channels"};
    app.require_subcommand(1);

    RunConfig cfg;
    app.add_option("--tol", cfg.tol, "iteration tolerance for capacity computations");
    app.add_option("--max-iter", cfg.max_iter, "iteration cap for capacity computations");
    app.add_option("--lp-limit", cfg.lp_limit, "largest atom count n^m sent to the LP solver");
    app.add_option("--strategy-limit", cfg.strategy_limit, "largest strategy-channel row count");
    app.add_option("--ordering-seed", cfg.ordering_seed,
                   "seed for the greedy extraction ordering (0 = lexicographic)");
    app.add_option("--output", cfg.output, "write the report here instead of stdout");
    app.add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    std::string channel_path;
    std::string birkhoff_spec;

    CLI::App* analyze = app.add_subcommand("analyze", "full capacity report for a channel file");
    analyze->add_option("channel", channel_path, "channel JSON file")->required();

    CLI::App* decompose =
        app.add_subcommand("decompose", "decompose a channel into deterministic channels");
    decompose->add_option("channel", channel_path, "channel JSON file")->required();
    decompose->add_option("--birkhoff", birkhoff_spec,
                          "integer column-sum bounds a,b (greedy vertex extraction otherwise)");

    std::string family = "bsc";
    double eps1 = 0.0;
    std::string param_grid = "0:0.5:0.05";
    CLI::App* sweep = app.add_subcommand("sweep", "closed-form curves for binary channels");
    sweep->add_option("--family", family, "channel family")
        ->check(CLI::IsMember({"bsc", "z", "binary"}));
    sweep->add_option("--eps1", eps1, "first crossover (family=binary sweeps the second)");
    sweep->add_option("--param-grid", param_grid, "parameter grid start:stop:step");

    std::string preset = "paper-fig5";
    double q = 0.25;
    std::string p_grid = "0:0.5:0.01";
    CLI::App* si = app.add_subcommand("si-sweep", "causal side-information capacity sweep");
    si->add_option("--preset", preset, "model preset");
    si->add_option("--q", q, "decoder-side observation noise");
    si->add_option("--p-grid", p_grid, "encoder-side noise grid start:stop:step");

    CLI::App* verify = app.add_subcommand("verify-paper", "run the built-in verification suite");

    // Let the global flags (--tol, --output, ...) appear after the subcommand.
    for (CLI::App* sub : {analyze, decompose, sweep, si, verify}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(cfg, channel_path);
        if (decompose->parsed()) {
            std::optional<std::pair<int, int>> birkhoff;
            if (!birkhoff_spec.empty()) {
                int a = 0;
                int b = 0;
                char comma = 0;
                std::istringstream in(birkhoff_spec);
                if (!(in >> a >> comma >> b) || comma != ',' || !in.eof())
                    throw DomainError("--birkhoff expects a,b integers");
                birkhoff = {a, b};
            }
            return cmd_decompose(cfg, channel_path, birkhoff);
        }
        if (sweep->parsed()) return cmd_sweep(cfg, family, eps1, param_grid);
        if (si->parsed()) return cmd_si_sweep(cfg, preset, q, p_grid);
        if (verify->parsed()) return cmd_verify_paper(cfg);
        return 2;
    } catch (const NotStochastic& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const WrongShape& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const TooLarge& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Infeasible& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
