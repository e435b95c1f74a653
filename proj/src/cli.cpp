#include "aew/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aew/complexity.hpp"
#include "aew/gaussian.hpp"
#include "aew/harness.hpp"

namespace aew {

namespace {

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad integer: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

Constants parse_constants(const std::vector<std::string>& entries) {
    Constants c;
    for (const std::string& entry : entries) {
        std::stringstream ss(entry);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            if (kv.empty()) continue;
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--constants expects key=value, got: " + kv);
            c.apply(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
        }
    }
    return c;
}

// Flags beat config-file values, which beat defaults: config entries are
// injected as tokens ahead of the user's own flags and every single-valued
// option takes its last occurrence.
std::vector<std::string> merge_config_tokens(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot read config file: " + config_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config parse error: " + std::string(e.what()));
    }
    if (!doc.is_object())
        throw std::invalid_argument("config must be a flat JSON object of flag values");

    std::vector<std::string> injected;
    for (const auto& [key, value] : doc.items()) {
        if (key == "config") continue;
        injected.push_back("--" + key);
        if (value.is_string())
            injected.push_back(value.get<std::string>());
        else if (value.is_boolean())
            injected.back() += value.get<bool>() ? "=true" : "=false";
        else if (value.is_number_integer())
            injected.push_back(format_i64(value.get<long long>()));
        else if (value.is_number_unsigned())
            injected.push_back(format_u64(value.get<std::uint64_t>()));
        else if (value.is_number_float())
            injected.push_back(format_double(value.get<double>()));
        else
            throw std::invalid_argument("config key '" + key + "' must be scalar");
    }
    std::size_t pos = 0;  // after the subcommand names, before the first flag
    while (pos < args.size() && args[pos].rfind("-", 0) != 0) ++pos;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), injected.begin(),
                injected.end());
    return args;
}

CLI::Option* one(CLI::Option* opt) {
    return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

struct ExpFlags {
    std::string n_list;
    std::string t_list;
    long long trials = 1000;
    std::uint64_t seed = 0;
    std::string out;
    std::string svg;
    std::string json;
    int workers = 0;
    std::vector<std::string> constants;
    std::string config;
};

void add_common_exp_flags(CLI::App* cmd, ExpFlags& f) {
    one(cmd->add_option("--n", f.n_list, "sample size grid, comma separated")->required());
    one(cmd->add_option("--temperature", f.t_list, "temperature grid, comma separated"));
    one(cmd->add_option("--trials", f.trials, "Monte Carlo replicates per grid point"));
    one(cmd->add_option("--seed", f.seed, "master seed (required)"));
    one(cmd->add_option("--out", f.out, "CSV output path")->required());
    one(cmd->add_option("--svg", f.svg, "also write a log-log rate plot here"));
    one(cmd->add_option("--json", f.json, "also write the table as JSON here"));
    one(cmd->add_option("--workers", f.workers, "worker threads (0 = hardware)"));
    cmd->add_option("--constants", f.constants,
                    "override unnamed constants, e.g. lambda_c=1.0,kappa1=1.0");
    one(cmd->add_option("--config", f.config, "JSON config file (flags override it)"));
}

ExperimentConfig base_config(const ExpFlags& f, CLI::App* cmd) {
    ExperimentConfig cfg;
    cfg.n_grid = parse_int_list(f.n_list);
    cfg.t_grid = parse_double_list(f.t_list);
    cfg.trials = f.trials;
    cfg.master_seed = f.seed;
    cfg.seed_set = cmd->count("--seed") > 0;
    cfg.workers = f.workers;
    cfg.constants = parse_constants(f.constants);
    return cfg;
}

void write_outputs(const ResultTable& table, const ExpFlags& f, const std::string& y_col) {
    emit_csv(table, f.out);
    if (!f.json.empty()) emit_json(table, f.json);
    if (!f.svg.empty()) {
        RatePlotSpec spec;
        spec.y_col = y_col;
        spec.title = "excess risk vs n";
        emit_svg_rate_plot(table, f.svg, spec);
    }
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) warn(w);
}

int run_cli(std::vector<std::string> args) {
    CLI::App app{"aggregation with exponential weights: experiments and diagnostics"};
    app.require_subcommand(1);

    CLI::App* exp = app.add_subcommand("exp", "run a seeded experiment grid");
    exp->require_subcommand(1);

    ExpFlags fa;
    fa.t_list = "0.1";
    double a_threshold = -1.0;
    CLI::App* exp_a = exp->add_subcommand(
        "theorem-a", "two-function low-temperature counterexample (exact + MC)");
    add_common_exp_flags(exp_a, fa);
    one(exp_a->add_option("--threshold", a_threshold,
                          "tail threshold (default 1/(2 sqrt n))"));

    ExpFlags fb;
    fb.t_list = "0.05";
    double b_eps = 0.1, b_kappa = 1.0, b_lambda = -1.0;
    int b_m = 0;
    CLI::App* exp_b = exp->add_subcommand(
        "theorem-b", "large-dictionary weight-collapse construction");
    add_common_exp_flags(exp_b, fb);
    one(exp_b->add_option("--eps", b_eps, "construction epsilon in (0, 1/8)"));
    one(exp_b->add_option("--kappa", b_kappa, "construction kappa"));
    one(exp_b->add_option("--lambda", b_lambda,
                          "override lambda (default eps sqrt(log M / n))"));
    one(exp_b->add_option("--M", b_m, "override dictionary size"));

    ExpFlags fc;
    fc.t_list = "0.2";
    int c_m = 50;
    double c_b = 1.0, c_x = 3.0;
    std::string c_model = "bernstein";
    CLI::App* exp_c = exp->add_subcommand(
        "theorem-c", "fast-rate experiment on a well-specified dictionary");
    add_common_exp_flags(exp_c, fc);
    one(exp_c->add_option("--M", c_m, "dictionary size"));
    one(exp_c->add_option("--b", c_b, "loss bound"));
    one(exp_c->add_option("--x", c_x, "confidence parameter"));
    one(exp_c->add_option("--model", c_model, "dictionary: bernstein | theorem-a")
            ->check(CLI::IsMember({"bernstein", "theorem-a"})));

    std::string psi_deltas;
    double psi_r = 1.0, psi_b = 1.0, psi_bb = 1.0;
    CLI::App* psi_cmd = app.add_subcommand("psi", "complexity of an excess-risk profile");
    one(psi_cmd->add_option("--deltas", psi_deltas, "sorted excess risks, first 0")
            ->required());
    one(psi_cmd->add_option("--r", psi_r, "scale r > 0")->required());
    one(psi_cmd->add_option("--b", psi_b, "loss bound"));
    one(psi_cmd->add_option("--B", psi_bb, "Bernstein constant"));

    long long g_ell = 1, g_level = 2;
    int g_inner = 1;
    std::string g_kind = "uniform";
    std::uint64_t g_seed = 0;
    std::uint64_t g_samples = 10'000'000;
    CLI::App* g_cmd =
        app.add_subcommand("gamma1", "quantile of the minimum of normalized sums");
    one(g_cmd->add_option("--ell", g_ell, "number of copies")->required());
    one(g_cmd->add_option("--level-n", g_level, "the n in 1 - 1/n")->required());
    one(g_cmd->add_option("--inner-n", g_inner, "summands per normalized sum")->required());
    one(g_cmd->add_option("--kind", g_kind, "uniform | gaussian")
            ->check(CLI::IsMember({"uniform", "gaussian"})));
    one(g_cmd->add_option("--seed", g_seed, "seed (required for the Monte Carlo path)"));
    one(g_cmd->add_option("--samples", g_samples, "Monte Carlo sample count"));

    std::string be_kind = "uniform";
    int be_inner = 16;
    std::uint64_t be_samples = 1'000'000;
    std::uint64_t be_seed = 0;
    CLI::App* be_cmd = app.add_subcommand(
        "be-check", "empirical Kolmogorov distance against the normal CDF");
    one(be_cmd->add_option("--kind", be_kind, "uniform | rademacher | gaussian")
            ->check(CLI::IsMember({"uniform", "rademacher", "gaussian"})));
    one(be_cmd->add_option("--inner-n", be_inner, "summands per normalized sum")
            ->required());
    one(be_cmd->add_option("--samples", be_samples, "Monte Carlo sample count"));
    one(be_cmd->add_option("--seed", be_seed, "seed (required)"));

    std::string w_risks;
    long long w_n = 1;
    double w_t = 1.0;
    CLI::App* w_cmd = app.add_subcommand("weights", "exponential weights from risks");
    one(w_cmd->add_option("--risks", w_risks, "empirical risks, comma separated")
            ->required());
    one(w_cmd->add_option("--n", w_n, "sample size behind the risks")->required());
    one(w_cmd->add_option("--temperature", w_t, "temperature")->required());

    try {
        std::vector<std::string> tokens = merge_config_tokens(std::move(args));
        std::reverse(tokens.begin(), tokens.end());
        app.parse(std::move(tokens));
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage message
        return 2;
    }

    std::vector<std::string> warnings;
    if (exp_a->parsed()) {
        ExperimentConfig cfg = base_config(fa, exp_a);
        cfg.theorem = TheoremId::a;
        if (exp_a->count("--threshold")) cfg.threshold = a_threshold;
        const ResultTable table = run_theorem_a(cfg, &warnings);
        print_warnings(warnings);
        write_outputs(table, fa, "exact_mean_excess");
        std::cout << "wrote " << fa.out << " (" << table.rows.size() << " rows)\n";
        return 0;
    }
    if (exp_b->parsed()) {
        ExperimentConfig cfg = base_config(fb, exp_b);
        cfg.theorem = TheoremId::b;
        cfg.epsilon = b_eps;
        cfg.kappa = b_kappa;
        if (exp_b->count("--lambda")) cfg.lambda_override = b_lambda;
        if (exp_b->count("--M")) cfg.m_override = b_m;
        const ResultTable table = run_theorem_b(cfg, &warnings);
        print_warnings(warnings);
        write_outputs(table, fb, "mean_excess");
        std::cout << "wrote " << fb.out << " (" << table.rows.size() << " rows)\n";
        return 0;
    }
    if (exp_c->parsed()) {
        ExperimentConfig cfg = base_config(fc, exp_c);
        cfg.theorem = TheoremId::c;
        cfg.dict_m = c_m;
        cfg.dict_b = c_b;
        cfg.x = c_x;
        cfg.dict_kind = c_model == "bernstein" ? DictionaryKind::bernstein
                                               : DictionaryKind::theorem_a;
        const ResultTable table = run_theorem_c(cfg, &warnings);
        print_warnings(warnings);
        const std::string y_col = cfg.dict_kind == DictionaryKind::bernstein
                                      ? "mean_excess"
                                      : "exact_mean_excess";
        write_outputs(table, fc, y_col);
        if (table.rows.size() >= 2)
            std::cout << "rate-fit slope (log " << y_col << " vs log n): "
                      << format_double(rate_fit_slope(table, "n", y_col)) << '\n';
        std::cout << "wrote " << fc.out << " (" << table.rows.size() << " rows)\n";
        return 0;
    }
    if (psi_cmd->parsed()) {
        const ExcessRiskProfile profile =
            ExcessRiskProfile::create(parse_double_list(psi_deltas), psi_b, psi_bb);
        std::printf("%.4f\n", psi(profile, psi_r).psi_value);
        return 0;
    }
    if (g_cmd->parsed()) {
        Gamma1Query q;
        q.ell = g_ell;
        q.level_n = g_level;
        q.spec = g_kind == "gaussian" ? NormalizedSumSpec::gaussian(g_inner)
                                      : NormalizedSumSpec::uniform_based(g_inner);
        const bool needs_mc = q.spec.kind == SummandKind::uniform_based && g_inner > 60;
        if (needs_mc && g_cmd->count("--seed") == 0)
            throw std::invalid_argument(
                "gamma1: --seed is required when inner-n > 60 (Monte Carlo path)");
        Rng rng = make_rng(g_seed);
        std::cout << format_double(gamma1(q, &rng, g_samples)) << '\n';
        return 0;
    }
    if (be_cmd->parsed()) {
        if (be_cmd->count("--seed") == 0)
            throw std::invalid_argument("be-check: --seed is required");
        NormalizedSumSpec spec =
            be_kind == "uniform"      ? NormalizedSumSpec::uniform_based(be_inner)
            : be_kind == "rademacher" ? NormalizedSumSpec::rademacher_shifted(be_inner)
                                      : NormalizedSumSpec::gaussian(be_inner);
        Rng rng = make_rng(be_seed);
        const BerryEsseenResult res = berry_esseen_distance(spec, be_samples, rng);
        std::cout << "distance=" << format_double(res.distance)
                  << " bound=" << format_double(res.bound) << '\n';
        return 0;
    }
    if (w_cmd->parsed()) {
        EmpiricalRisks risks{parse_double_list(w_risks), static_cast<std::size_t>(w_n)};
        const WeightVector w = aew_weights(risks, Temperature(w_t));
        for (std::size_t j = 0; j < w.size(); ++j)
            std::cout << (j ? "," : "") << format_double(w.theta[j]);
        std::cout << '\n';
        return 0;
    }
    return 0;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        return run_cli(std::move(args));
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace aew
