// Command-line front end: data ingestion, subcommand dispatch, structured
// JSON output. Exit codes: 0 success, 1 user error, 2 acceptance stalled,
// 3 internal numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ivbound/engine.hpp"
#include "ivbound/io.hpp"
#include "ivbound/kernel.hpp"
#include "ivbound/model.hpp"
#include "ivbound/oracle.hpp"
#include "ivbound/sim.hpp"

namespace {

using namespace ivbound;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("IVBOUND_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(output_path);
        if (!out) throw ParseError("cannot open output file: " + output_path);
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
    }
}

std::string render_coverage_text(const std::vector<sim::CoverageRow>& rows) {
    std::string out = "method    n      side   LR%    UR%    WD      stalled\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-9s %-6lld %-6s %-6.2f %-6.2f %-7.4f %lld\n",
                      sim::to_string(r.method).c_str(), r.n,
                      r.side == sim::BoundSide::LOWER ? "lower" : "upper",
                      r.lr_percent, r.ur_percent, r.mean_width, r.stalled);
        out += buf;
    }
    return out;
}

std::string render_coverage_csv(const std::vector<sim::CoverageRow>& rows) {
    std::string out = "method,n,side,lr_percent,ur_percent,mean_width,stalled\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%lld,%s,%g,%g,%g,%lld\n",
                      sim::to_string(r.method).c_str(), r.n,
                      r.side == sim::BoundSide::LOWER ? "lower" : "upper",
                      r.lr_percent, r.ur_percent, r.mean_width, r.stalled);
        out += buf;
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Fiducial bounds for binary instrumental-variable models"};
    app.require_subcommand(1);

    std::string input_path, output_path, samples_path, config_path;
    std::string estimand_name = "ate", assumption_name = "core",
                method_name = "fiducial";
    long long n_mcmc = 1000, max_attempts = -1, n_records = 100, n_probe = 1000;
    int scenario_num = 1;
    std::uint64_t seed = default_seed();
    double level = 0.95;
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    auto add_common = [&](CLI::App* cmd, bool with_sampling) {
        cmd->add_option("--input", input_path, "records or counts CSV")
            ->required();
        cmd->add_option("--estimand", estimand_name,
                        "ate|cace|nudge|never-taker-ace|always-taker-ace|defier-ace");
        cmd->add_option("--assumptions", assumption_name,
                        "core|monotonicity|new-drug");
        cmd->add_option("--output", output_path, "write result here (default stdout)");
        if (with_sampling) {
            cmd->add_option("--n-mcmc", n_mcmc, "accepted fiducial samples");
            cmd->add_option("--seed", seed, "RNG seed");
            cmd->add_option("--level", level, "confidence level in (0,1)");
            cmd->add_option("--workers", workers, "worker threads");
            cmd->add_option("--max-attempts", max_attempts,
                            "total proposal cap (default 1000 * n-mcmc)");
            cmd->add_option("--method", method_name, "fiducial|bayes1|bayes2");
            cmd->add_option("--dump-samples", samples_path,
                            "write raw (l,u) samples as CSV");
        }
    };

    auto* analyze_cmd = app.add_subcommand("analyze",
                                           "acceptance sampling, per-draw bounds, quantile CIs");
    add_common(analyze_cmd, true);

    auto* bounds_cmd =
        app.add_subcommand("bounds", "plug-in bounds at the empirical proportions");
    add_common(bounds_cmd, false);

    auto* simulate_cmd = app.add_subcommand("simulate", "emit a synthetic records CSV");
    simulate_cmd->add_option("--scenario", scenario_num, "1 or 2")->required();
    simulate_cmd->add_option("--n", n_records, "number of records");
    simulate_cmd->add_option("--seed", seed, "RNG seed");
    simulate_cmd->add_option("--output", output_path, "write CSV here (default stdout)");

    auto* coverage_cmd =
        app.add_subcommand("coverage", "coverage/width experiment from a config file");
    coverage_cmd->add_option("--config", config_path, "key = value config file")
        ->required();
    coverage_cmd->add_option("--output", output_path, "write CSV table here");
    coverage_cmd->add_option("--workers", workers, "worker threads");

    auto* diagnose_cmd =
        app.add_subcommand("diagnose", "IV-assumption plausibility probe");
    diagnose_cmd->add_option("--input", input_path, "records or counts CSV")
        ->required();
    diagnose_cmd->add_option("--assumptions", assumption_name,
                             "core|monotonicity|new-drug");
    diagnose_cmd->add_option("--n-probe", n_probe, "number of proposals")
        ->check(CLI::PositiveNumber);
    diagnose_cmd->add_option("--seed", seed, "RNG seed");
    diagnose_cmd->add_option("--output", output_path, "write report here");

    auto* lpdump_cmd = app.add_subcommand(
        "lp-dump", "dump the plug-in LP in line-oriented text form");
    add_common(lpdump_cmd, false);

    CLI11_PARSE(app, argc, argv);

    if (level <= 0.0 || level >= 1.0) {
        // level = 1 is allowed internally for experiments, not via the CLI
        if (level != 1.0) throw ParseError("--level must lie in (0,1)");
    }
    if (n_mcmc < 1) throw ParseError("--n-mcmc must be at least 1");

    const auto est = [&] { return estimand(estimand_kind_from_string(estimand_name)); };
    const auto asms = [&] {
        return assumptions(assumption_label_from_string(assumption_name));
    };

    if (analyze_cmd->parsed()) {
        const auto counts = io::read_counts_csv(input_path);
        const auto method = sim::method_from_string(method_name);
        AnalysisResult res;
        if (method == sim::Method::FIDUCIAL) {
            res = analyze(counts, est(), asms(), n_mcmc, seed, level, workers,
                          max_attempts);
        } else {
            res = sim::bayesian_comparator(counts, sim::comparator_prior(method),
                                           n_mcmc, seed, est(), asms(), level);
        }
        emit(io::to_json(res).dump(2), output_path);
        if (!samples_path.empty()) {
            std::ofstream out(samples_path);
            io::write_samples_csv(out, res.samples);
        }
    } else if (bounds_cmd->parsed()) {
        const auto counts = io::read_counts_csv(input_path);
        const auto [lo, hi] = oracle::plug_in_bounds(counts, est(), asms());
        nlohmann::ordered_json j;
        j["estimand"] = estimand_name;
        j["assumptions"] = assumption_name;
        j["lower"] = lo;
        j["upper"] = hi;
        emit(j.dump(2), output_path);
    } else if (simulate_cmd->parsed()) {
        if (scenario_num != 1 && scenario_num != 2)
            throw ParseError("--scenario must be 1 or 2");
        const auto spec = sim::scenario(scenario_num == 1
                                            ? sim::ScenarioId::SCENARIO_1
                                            : sim::ScenarioId::SCENARIO_2);
        const auto records = sim::simulate(spec, n_records, seed);
        std::ostringstream os;
        io::write_records_csv(os, records);
        emit(os.str(), output_path);
    } else if (coverage_cmd->parsed()) {
        std::ifstream cfg_in(config_path);
        if (!cfg_in) throw ParseError("cannot open config file: " + config_path);
        auto cfg = io::read_config(cfg_in);
        auto get = [&](const std::string& key, const std::string& fallback) {
            auto it = cfg.find(key);
            return it == cfg.end() ? fallback : it->second;
        };
        const int scen = std::stoi(get("scenario", "1"));
        if (scen != 1 && scen != 2) throw ParseError("scenario must be 1 or 2");
        const auto spec = sim::scenario(scen == 1 ? sim::ScenarioId::SCENARIO_1
                                                  : sim::ScenarioId::SCENARIO_2);
        std::vector<long long> n_list;
        {
            std::stringstream ss(get("n_list", "25,50,100"));
            std::string tok;
            while (std::getline(ss, tok, ',')) n_list.push_back(std::stoll(tok));
        }
        const long long reps = std::stoll(get("replications", "200"));
        const long long iters = std::stoll(get("n_mcmc", "1000"));
        const double lvl = std::stod(get("level", "0.95"));
        const std::uint64_t sd = std::stoull(get("seed", std::to_string(seed)));
        const auto method = sim::method_from_string(get("method", "fiducial"));
        const auto e = estimand(estimand_kind_from_string(get("estimand", "ate")));
        const auto a =
            assumptions(assumption_label_from_string(get("assumptions", "core")));
        const auto rows = sim::coverage_experiment(spec, n_list, reps, iters, lvl,
                                                   method, e, a, sd, workers);
        std::cout << render_coverage_text(rows);
        if (!output_path.empty()) emit(render_coverage_csv(rows), output_path);
    } else if (diagnose_cmd->parsed()) {
        const auto counts = io::read_counts_csv(input_path);
        const auto a = asms();
        long long accepted = 0;
        for (long long k = 0; k < n_probe; ++k) {
            RngStream rng(seed, static_cast<std::uint64_t>(k));
            if (feasible(propose(counts, rng), a)) ++accepted;
        }
        const double rate =
            static_cast<double>(accepted) / static_cast<double>(n_probe);
        const bool q_in_f = oracle::exact_empirical_feasible(counts, a);
        nlohmann::ordered_json j;
        j["assumptions"] = assumption_name;
        j["n_probe"] = n_probe;
        j["acceptance_rate"] = rate;
        j["empirical_q_feasible"] = q_in_f;
        j["interpretation"] =
            "The acceptance rate estimates the fiducial probability that the "
            "observed data agree with the IV assumptions: a high rate points "
            "toward trust in their feasibility, a rate near 0 suggests they "
            "are likely violated, and intermediate values suggest proximity "
            "to the feasibility boundary.";
        emit(j.dump(2), output_path);
    } else if (lpdump_cmd->parsed()) {
        const auto counts = io::read_counts_csv(input_path);
        const auto q = empirical_proportions(counts);
        const auto e = est();
        const auto strata = ActiveStrata::from(asms());
        auto lp = equality_polytope(q, strata);
        lp.objective = strata.reduce(e.numerator);
        lp.maximize = true;
        std::ostringstream os;
        io::write_lp_dump(os, lp);
        emit(os.str(), output_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ivbound::AcceptanceStalled& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "attempts: " << e.attempts
                  << ", accepted: " << e.accepted << "\n";
        return 2;
    } catch (const ivbound::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ivbound::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
