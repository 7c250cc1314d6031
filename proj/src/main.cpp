// Command-line driver: simulate the two-phase trading algorithm, compute
// hindsight benchmarks, emit adversary sequences and price grids, and run
// the verification suites. All randomness flows from --seed through a fixed
// splitting rule, so identical invocations produce byte-identical output.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bilat/adversaries.hpp"
#include "bilat/benchmarks.hpp"
#include "bilat/gftmax.hpp"
#include "bilat/grids.hpp"
#include "bilat/harness.hpp"

namespace
{

using nlohmann::json;

std::ostream &open_out(std::ofstream &file, const std::string &path)
{
    if (path.empty())
        return std::cout;
    file.open(path);
    if (!file)
        throw std::runtime_error("cannot open output file: " + path);
    return file;
}

json horizon_json(const bilat::HorizonAggregate &h)
{
    return {{"T", h.T},
            {"mean_regret", h.mean_regret},
            {"std_regret", h.std_regret},
            {"mean_budget", h.mean_budget},
            {"frac_phase2_unreached", h.frac_phase2_unreached},
            {"replications", h.replications}};
}

int cmd_simulate(const bilat::ExperimentConfig &config, const std::string &out,
                 bool as_json)
{
    bilat::AggregateResult agg = bilat::run(config);

    // Single horizon, single replication: also emit the full trace summary.
    std::ofstream file;
    std::ostream &os = open_out(file, out);
    if (as_json)
    {
        json j;
        j["preset"] = config.preset;
        j["adversary"] = config.adversary.family;
        j["seed"] = config.master_seed;
        j["horizons"] = json::array();
        for (const bilat::HorizonAggregate &h : agg.per_horizon)
            j["horizons"].push_back(horizon_json(h));
        if (agg.slope.has_value())
            j["slope"] = {{"value", agg.slope->slope},
                          {"stderr", agg.slope->stderr_},
                          {"points_used", agg.slope->points_used}};
        if (config.horizons.size() == 1 && config.replications == 1)
        {
            long T = config.horizons[0];
            std::uint64_t seed = bilat::derive_seed(config.master_seed, T, 0);
            bilat::Rng seq_rng(bilat::splitmix64(seed));
            bilat::ValuationSequence seq =
                bilat::make_sequence(config.adversary, T, seq_rng);
            bilat::GftMaxConfig cfg =
                config.algo_config(static_cast<long>(seq.size()), seed);
            bilat::RunTrace trace = bilat::gft_max(cfg, seq);
            j["run"] = bilat::run_summary_json(cfg, seq, trace);
        }
        os << j.dump(2) << '\n';
    }
    else
    {
        os << "T,mean_regret,std_regret,mean_budget\n";
        for (const bilat::HorizonAggregate &h : agg.per_horizon)
            os << h.T << ',' << bilat::format_double(h.mean_regret) << ','
               << bilat::format_double(h.std_regret) << ','
               << bilat::format_double(h.mean_budget) << '\n';
        if (agg.slope.has_value())
            os << "# slope," << bilat::format_double(agg.slope->slope) << ','
               << bilat::format_double(agg.slope->stderr_) << '\n';
    }
    return 0;
}

int cmd_verify(const std::string &suite, long N, std::uint64_t seed,
               const std::string &out, bool as_json)
{
    std::vector<bilat::VerifyReport> reports;
    if (suite == "discretization")
        reports.push_back(bilat::verify_discretization(seed));
    else if (suite == "estimator")
        reports.push_back(bilat::verify_estimator(seed));
    else if (suite == "budget")
        reports.push_back(bilat::verify_budget(seed));
    else if (suite == "benchmarks")
        reports.push_back(bilat::verify_benchmarks(seed));
    else if (suite == "lb-structure")
        reports.push_back(bilat::verify_lb_structure(N));
    else if (suite == "all")
        reports = bilat::verify_all(seed);
    else
        throw CLI::ValidationError("unknown suite: " + suite);

    bool all_pass = true;
    std::ofstream file;
    std::ostream &os = open_out(file, out);
    if (as_json)
    {
        json j = json::array();
        for (const bilat::VerifyReport &r : reports)
        {
            json lines = json::array();
            for (const bilat::CheckLine &l : r.lines)
                lines.push_back({{"name", l.name},
                                 {"lhs", l.lhs},
                                 {"rhs", l.rhs},
                                 {"pass", l.pass}});
            j.push_back({{"suite", r.suite},
                         {"passed", r.passed()},
                         {"checks", lines}});
            all_pass = all_pass && r.passed();
        }
        os << j.dump(2) << '\n';
    }
    else
    {
        for (const bilat::VerifyReport &r : reports)
        {
            os << "suite " << r.suite << ": "
               << (r.passed() ? "PASS" : "FAIL") << '\n';
            for (const bilat::CheckLine &l : r.lines)
                os << "  [" << (l.pass ? "ok" : "FAIL") << "] " << l.name
                   << "  lhs=" << bilat::format_double(l.lhs)
                   << " rhs=" << bilat::format_double(l.rhs) << '\n';
            all_pass = all_pass && r.passed();
        }
    }
    return all_pass ? 0 : 1;
}

std::vector<long> parse_horizons(const std::string &list)
{
    std::vector<long> out;
    std::string token;
    std::istringstream is(list);
    while (std::getline(is, token, ','))
        if (!token.empty())
            out.push_back(std::stol(token));
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"budget-balanced bilateral trade simulator"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    std::string sim_algo = "full", sim_adversary = "iid-uniform";
    std::string sim_horizons = "1024", sim_out, sim_config_path, sim_outdir;
    long sim_reps = 1, sim_N = 64, sim_k = 0;
    double sim_eps = 0.05;
    std::uint64_t sim_seed = 0;
    bool sim_json = false, sim_traces = false;
    CLI::App *sim = app.add_subcommand("simulate", "run the algorithm");
    sim->add_option("--algo", sim_algo)->check(CLI::IsMember({"full", "onebit"}));
    sim->add_option("--adversary", sim_adversary)
        ->check(CLI::IsMember({"iid-uniform", "full-lb", "gap", "twobit-lb"}));
    sim->add_option("--T", sim_horizons, "comma-separated horizons");
    sim->add_option("--reps", sim_reps);
    sim->add_option("--seed", sim_seed);
    sim->add_option("--eps", sim_eps, "gap-sequence epsilon");
    sim->add_option("--N", sim_N, "two-bit family size");
    sim->add_option("--k", sim_k, "two-bit instance index");
    sim->add_option("--out", sim_out);
    sim->add_option("--outdir", sim_outdir, "directory for curve/trace files");
    sim->add_option("--config", sim_config_path, "JSON config file");
    sim->add_flag("--json", sim_json);
    sim->add_flag("--traces", sim_traces, "persist per-run trace CSVs");

    // --- benchmark --------------------------------------------------------
    std::string bm_in, bm_out;
    bool bm_json = false;
    CLI::App *bm = app.add_subcommand("benchmark", "hindsight oracles on a CSV");
    bm->add_option("--in", bm_in, "sequence CSV (s,b)")->required();
    bm->add_option("--out", bm_out);
    bm->add_flag("--json", bm_json);

    // --- adversary emit ---------------------------------------------------
    std::string adv_family = "iid", adv_out;
    long adv_T = 100, adv_N = 64, adv_k = 0;
    double adv_eps = -1.0; // gap epsilon or two-bit perturbation
    std::uint64_t adv_seed = 0;
    CLI::App *adv = app.add_subcommand("adversary", "adversary utilities");
    CLI::App *emit = adv->add_subcommand("emit", "write a valuation sequence CSV");
    emit->add_option("--family", adv_family)
        ->check(CLI::IsMember({"iid", "full-lb", "twobit-lb", "gap", "alpha-lb"}));
    emit->add_option("--T", adv_T)->required();
    emit->add_option("--seed", adv_seed);
    emit->add_option("--N", adv_N);
    emit->add_option("--k", adv_k);
    emit->add_option("--eps", adv_eps, "gap epsilon or two-bit perturbation");
    emit->add_option("--out", adv_out);

    // --- grid dump --------------------------------------------------------
    std::string grid_kind = "uniform", grid_out;
    long grid_K = 8, grid_T = 32;
    CLI::App *grid = app.add_subcommand("grid", "grid utilities");
    CLI::App *dump = grid->add_subcommand("dump", "write a price grid CSV");
    dump->add_option("--kind", grid_kind)
        ->check(CLI::IsMember({"uniform", "adjacent", "revenue"}));
    dump->add_option("--K", grid_K)->required();
    dump->add_option("--T", grid_T);
    dump->add_option("--out", grid_out);

    // --- verify -----------------------------------------------------------
    std::string ver_suite = "all", ver_out;
    long ver_N = 64;
    std::uint64_t ver_seed = 20240905;
    bool ver_json = false;
    CLI::App *ver = app.add_subcommand("verify", "run verification suites");
    ver->add_option("--suite", ver_suite)
        ->check(CLI::IsMember({"discretization", "estimator", "budget",
                               "benchmarks", "lb-structure", "all"}));
    ver->add_option("--N", ver_N);
    ver->add_option("--seed", ver_seed);
    ver->add_option("--out", ver_out);
    ver->add_flag("--json", ver_json);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (sim->parsed())
        {
            bilat::ExperimentConfig config;
            // File values first, flags override.
            if (!sim_config_path.empty())
            {
                std::ifstream cf(sim_config_path);
                if (!cf)
                    throw std::runtime_error("cannot read config file: " +
                                             sim_config_path);
                json j = json::parse(cf);
                if (j.contains("algo"))
                    config.preset = j["algo"].get<std::string>();
                if (j.contains("adversary"))
                    config.adversary.family = j["adversary"].get<std::string>();
                if (j.contains("T"))
                    config.horizons = j["T"].get<std::vector<long>>();
                if (j.contains("reps"))
                    config.replications = j["reps"].get<long>();
                if (j.contains("seed"))
                    config.master_seed = j["seed"].get<std::uint64_t>();
                if (j.contains("eps"))
                    config.adversary.epsilon = j["eps"].get<double>();
                if (j.contains("N"))
                    config.adversary.N = j["N"].get<long>();
                if (j.contains("k"))
                    config.adversary.k = j["k"].get<long>();
            }
            if (sim->count("--algo") || sim_config_path.empty())
                config.preset = sim_algo == "onebit" ? "onebit" : "full";
            if (sim->count("--adversary") || sim_config_path.empty())
                config.adversary.family = sim_adversary;
            if (sim->count("--T") || sim_config_path.empty())
                config.horizons = parse_horizons(sim_horizons);
            if (sim->count("--reps") || sim_config_path.empty())
                config.replications = sim_reps;
            if (sim->count("--seed") || sim_config_path.empty())
                config.master_seed = sim_seed;
            if (sim->count("--eps"))
                config.adversary.epsilon = sim_eps;
            if (sim->count("--N"))
                config.adversary.N = sim_N;
            if (sim->count("--k"))
                config.adversary.k = sim_k;
            config.out_dir = sim_outdir;
            config.write_traces = sim_traces;
            return cmd_simulate(config, sim_out, sim_json);
        }
        if (bm->parsed())
        {
            std::ifstream is(bm_in);
            if (!is)
                throw std::runtime_error("cannot read sequence: " + bm_in);
            bilat::ValuationSequence seq = bilat::load_sequence_csv(is);
            bilat::HindsightReport h = bilat::hindsight_report(seq);
            std::ofstream file;
            std::ostream &os = open_out(file, bm_out);
            if (bm_json)
            {
                json j;
                j["T"] = seq.size();
                j["best_fixed_price"] = h.best_fixed.price;
                j["best_fixed_price_value"] = h.best_fixed.value;
                j["best_distribution_value"] = h.best_distribution.value;
                j["best_distribution_expected_revenue"] =
                    h.best_distribution.expected_revenue;
                if (h.ratio.has_value())
                    j["ratio"] = *h.ratio;
                os << j.dump(2) << '\n';
            }
            else
            {
                os << "best fixed price " << h.best_fixed.price << " value "
                   << bilat::format_double(h.best_fixed.value)
                   << "; best distribution value "
                   << bilat::format_double(h.best_distribution.value);
                if (h.ratio.has_value())
                    os << "; ratio " << bilat::format_double(*h.ratio);
                os << '\n';
            }
            return 0;
        }
        if (emit->parsed())
        {
            bilat::Rng rng(adv_seed);
            bilat::ValuationSequence seq;
            if (adv_family == "iid")
                seq = bilat::iid_uniform_sequence(adv_T, rng);
            else if (adv_family == "full-lb")
                seq = bilat::iid_sequence(bilat::full_lb_distribution(), adv_T,
                                          rng);
            else if (adv_family == "twobit-lb")
            {
                bilat::TwoBitLBParams P =
                    adv_eps > 0.0
                        ? bilat::TwoBitLBParams(adv_N, adv_k,
                                                bilat::Rational(adv_eps))
                        : bilat::TwoBitLBParams(adv_N, adv_k);
                seq = bilat::iid_sequence(bilat::twobit_lb_distribution(P),
                                          adv_T, rng);
            }
            else if (adv_family == "gap")
                seq = bilat::benchmark_gap_sequence(
                    adv_eps > 0.0 ? adv_eps : 0.05, adv_T);
            else // alpha-lb: emit the two sequences concatenated S1 then S2
            {
                auto [s1, s2] = bilat::alpha_lb_sequences(adv_T, rng);
                seq = s1;
                seq.insert(seq.end(), s2.begin(), s2.end());
            }
            std::ofstream file;
            std::ostream &os = open_out(file, adv_out);
            bilat::write_sequence_csv(os, seq);
            return 0;
        }
        if (dump->parsed())
        {
            bilat::PriceGrid g;
            if (grid_kind == "uniform")
                g = bilat::uniform_grid(static_cast<int>(grid_K));
            else if (grid_kind == "adjacent")
                g = bilat::adjacent_pairs(static_cast<int>(grid_K));
            else
                g = bilat::revenue_grid(static_cast<int>(grid_K), grid_T);
            std::ofstream file;
            std::ostream &os = open_out(file, grid_out);
            os << "p,q\n";
            for (const bilat::PricePair &pq : g.points)
                os << bilat::format_double(pq.p) << ','
                   << bilat::format_double(pq.q) << '\n';
            return 0;
        }
        if (ver->parsed())
            return cmd_verify(ver_suite, ver_N, ver_seed, ver_out, ver_json);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
