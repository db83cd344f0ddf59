// weakch command-line entry point. Every command prints one envelope
// {command, inputs, result, version} on stdout; diagnostics go to stderr.
// Exit codes: 0 ok, 1 usage, 2 precondition/validation failure,
// 3 inequality violation detected.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "output.hpp"
#include "weakch/common_cause.hpp"
#include "weakch/eprb_model.hpp"
#include "weakch/eprb_sim.hpp"
#include "weakch/errors.hpp"
#include "weakch/inequalities.hpp"
#include "weakch/model_io.hpp"
#include "weakch/qm_singlet.hpp"
#include "weakch/search.hpp"

#ifndef WEAKCH_VERSION
#define WEAKCH_VERSION "unknown"
#endif

using nlohmann::json;
using namespace weakch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitViolation = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CmdResult {
    json inputs = json::object();
    json result = json::object();
    int exit_code = kExitOk;
    std::optional<std::string> csv;  // replaces the flattened result in CSV mode
};

json to_json(const ChTerms& t) {
    return {{"p13", t.p13}, {"p14", t.p14}, {"p24", t.p24}, {"p23", t.p23}, {"p1", t.p1}, {"p4", t.p4}};
}

json to_json(const WeakChReport& r) {
    json j = {{"value", r.value},
              {"lower", r.lower},
              {"upper", r.upper},
              {"epsilon", r.epsilon},
              {"violated_lower", r.violated_lower},
              {"violated_upper", r.violated_upper},
              {"violated", r.violated()}};
    if (r.terms) j["terms"] = to_json(*r.terms);
    return j;
}

json to_json(const CorrectionTerms& c) {
    return {{"d_minus_ab", c.d_minus_ab}, {"d_plus_ab", c.d_plus_ab}, {"d_minus", c.d_minus}, {"d_plus", c.d_plus}};
}

json to_json(const EpsilonProfile& p) {
    return {{"eps_ab", p.eps_ab},   {"eps_ba", p.eps_ba},           {"eps_a", p.eps_a},
            {"eps_b", p.eps_b},     {"partner_of_a", p.partner_of_a}, {"partner_of_b", p.partner_of_b},
            {"eps_global", p.eps_global}};
}

json angles_json(const std::array<Angle, 4>& th) {
    json t = json::array();
    for (const auto& a : th) t.push_back(a.radians());
    return {{"theta", t},
            {"phi",
             {{"13", (th[0] - th[2]).radians()},
              {"14", (th[0] - th[3]).radians()},
              {"24", (th[1] - th[3]).radians()},
              {"23", (th[1] - th[2]).radians()}}}};
}

std::array<Angle, 4> parse_angles(const std::vector<double>& v, bool degrees) {
    if (v.size() != 4) throw UsageError("--angles takes exactly four values theta1,theta2,theta3,theta4");
    std::array<Angle, 4> th;
    for (std::size_t k = 0; k < 4; ++k) th[k] = degrees ? Angle::degrees(v[k]) : Angle(v[k]);
    return th;
}

struct SettingOpts {
    double pa = 0.5, pb = 0.5, pab = 0.25;

    void add(CLI::App* cmd) {
        cmd->add_option("--pa", pa, "p(a)")->capture_default_str();
        cmd->add_option("--pb", pb, "p(b)")->capture_default_str();
        cmd->add_option("--pab", pab, "p(ab)")->capture_default_str();
    }
    SettingProbs probs() const { return {pa, pb, pab}; }
    json echo() const { return {{"pa", pa}, {"pb", pb}, {"pab", pab}}; }
};

// ---------------------------------------------------------------- predict

struct PredictCmd {
    std::vector<double> angles;
    std::optional<double> phi;
    std::string outcomes = "++";
    bool degrees = false;

    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("predict", "Singlet predictions: CH terms for four directions, or one joint probability");
        c->add_option("--angles", angles, "theta1,theta2 (Alice),theta3,theta4 (Bob)")->delimiter(',');
        c->add_option("--phi", phi, "angle between two directions, for a single joint probability");
        c->add_option("--outcomes", outcomes, "outcome pair for --phi: ++, +-, -+ or --")->capture_default_str();
        c->add_flag("--degrees", degrees, "angles are in degrees");
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() const {
        CmdResult o;
        o.inputs["degrees"] = degrees;
        if (!angles.empty()) {
            const auto th = parse_angles(angles, degrees);
            o.inputs["angles"] = angles;
            const ChTerms t = ch_terms(th);
            o.result = angles_json(th);
            o.result["terms"] = to_json(t);
            o.result["ch_value"] = t.value();
            o.result["in_tsirelson_interval"] = tsirelson_check(t.value());
            o.result["epsilon_profile"] = to_json(epsilon_profile(DirectionConfig{{th[0], th[1]}, {th[2], th[3]}}));
            return o;
        }
        if (!phi) throw UsageError("predict needs --angles or --phi");
        if (outcomes.size() != 2 || outcomes.find_first_not_of("+-") != std::string::npos) {
            throw UsageError("--outcomes must be one of ++, +-, -+, --");
        }
        const Angle a = degrees ? Angle::degrees(*phi) : Angle(*phi);
        const auto out = [](char c) { return c == '+' ? weakch::Outcome::plus : weakch::Outcome::minus; };
        o.inputs["phi"] = *phi;
        o.inputs["outcomes"] = outcomes;
        o.result = {{"phi", a.radians()},
                    {"outcomes", outcomes},
                    {"probability", joint_prob(a, out(outcomes[0]), out(outcomes[1]))},
                    {"marginal", marginal_prob(weakch::Outcome::plus)}};
        return o;
    }

};

// ----------------------------------------------------------------- bounds

struct BoundsCmd {
    double epsilon = 0.0;
    SettingOpts sp;

    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("bounds", "Weak CH bounds and correction terms for one epsilon");
        c->add_option("--epsilon", epsilon, "epsilon in [0, 1]")->required();
        sp.add(c);
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() const {
        CmdResult o;
        o.inputs = sp.echo();
        o.inputs["epsilon"] = epsilon;
        const CorrectionTerms ct = correction_terms(epsilon, sp.probs());
        const WeakBounds b = weak_ch_bounds(epsilon, sp.probs());
        o.result = {{"lower", b.lower}, {"upper", b.upper}, {"correction_terms", to_json(ct)}};
        return o;
    }
};

// ------------------------------------------------------------- thresholds

struct ThresholdsCmd {
    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("thresholds", "Largest epsilon at which the QM extrema break the weak bounds");
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() const {
        CmdResult o;
        const auto th = epsilon_thresholds();
        const auto four = [](double x) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3e", x);
            return std::string(buf);
        };
        o.result = {{"eps_lower_max", th.eps_lower_max},
                    {"eps_upper_max", th.eps_upper_max},
                    {"eps_lower_max_4sig", four(th.eps_lower_max)},
                    {"eps_upper_max_4sig", four(th.eps_upper_max)},
                    {"qm_min", kQuantumChMin},
                    {"qm_max", kQuantumChMax}};
        return o;
    }
};

// ------------------------------------------------------------------ check

struct CheckCmd {
    double value = 0.0;
    double epsilon = 0.0;
    SettingOpts sp;

    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("check", "Check a CH value against the weak bounds (exit 3 on violation)");
        c->add_option("--value", value, "CH combination value")->required();
        c->add_option("--epsilon", epsilon, "epsilon in [0, 1]")->capture_default_str();
        sp.add(c);
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() const {
        CmdResult o;
        o.inputs = sp.echo();
        o.inputs["value"] = value;
        o.inputs["epsilon"] = epsilon;
        const auto r = evaluate_weak_ch(value, weak_ch_bounds(epsilon, sp.probs()), epsilon);
        o.result = to_json(r);
        o.result["strict_ch_holds"] = ch_holds(value);
        o.result["in_tsirelson_interval"] = tsirelson_check(value);
        o.exit_code = r.violated() ? kExitViolation : kExitOk;
        return o;
    }
};

// ------------------------------------------------------------ check-model

struct CheckModelCmd {
    std::string file;
    std::optional<double> epsilon;

    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("check-model", "Validate a model file (eprb or pairwise) and check its bounds");
        c->add_option("--file", file, "model JSON file")->required();
        c->add_option("--epsilon", epsilon, "check against this epsilon instead of the model's own");
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() const {
        CmdResult o;
        o.inputs["file"] = file;
        if (epsilon) o.inputs["epsilon"] = *epsilon;
        const json j = read_json_file(file);
        const std::string kind = j.is_object() && j.contains("kind") && j["kind"].is_string() ? j["kind"].get<std::string>() : "";
        if (kind == "eprb") return eprb(eprb_model_from_json(j), std::move(o));
        if (kind == "pairwise") return pairwise(pairwise_model_from_json(j), std::move(o));
        throw BadModelFile("\"kind\" must be \"eprb\" or \"pairwise\"");
    }

    CmdResult eprb(const EprbModel& m, CmdResult o) const {
        const auto prof = epsilon_profile(m);
        const double eps = epsilon.value_or(prof.eps_global);
        const auto loc = validate_loc(m);
        const auto nc = validate_no_conspiracy(m);
        const auto scr = validate_screening(m, prof);
        const double worst = std::max({loc.max_abs(), nc.max_abs(), scr.max_abs()});
        const bool assumptions = worst <= kModelTolerance;

        o.result["kind"] = "eprb";
        o.result["cards"] = m.cards();
        o.result["epsilon_profile"] = to_json(prof);
        o.result["assumptions"] = {{"loc_max", loc.max_abs()},
                                   {"no_conspiracy_max", nc.max_abs()},
                                   {"screening_max", scr.max_abs()},
                                   {"penalty", loc.sum_sq() + nc.sum_sq() + scr.sum_sq()},
                                   {"skipped", loc.skipped.size() + scr.skipped.size()},
                                   {"hold", assumptions}};
        double nosig = 0.0;
        for (double r : no_signalling_residuals(outcome_tables(m))) nosig = std::max(nosig, std::abs(r));
        o.result["no_signalling_max"] = nosig;

        const ChTerms terms = ch_terms(m);
        const auto weak = evaluate_weak_ch(terms, weak_ch_bounds(m, eps), eps);
        o.result["weak_ch"] = to_json(weak);
        o.result["strict_ch_holds"] = ch_holds(terms.value());

        bool joint_ok = true;
        try {
            const auto jc = joint_cause_bounds_check(m, epsilon);
            json pairs = json::array();
            static const char* names[] = {"13", "14", "23", "24"};
            for (std::size_t k = 0; k < 4; ++k) {
                const auto& p = jc.pairs[k];
                pairs.push_back({{"pair", names[k]},
                                 {"p_plus_plus", p.p_plus_plus},
                                 {"p_causes", p.p_causes},
                                 {"d_plus", p.d_plus},
                                 {"d_minus", p.d_minus},
                                 {"lower_ok", p.lower_ok},
                                 {"upper_ok", p.upper_ok}});
            }
            json dirs = json::array();
            for (const auto& d : jc.directions) {
                dirs.push_back({{"direction", d.d + 1},
                                {"p_plus", d.p_plus},
                                {"p_cause", d.p_cause},
                                {"lower_ok", d.lower_ok},
                                {"upper_ok", d.upper_ok}});
            }
            o.result["joint_cause"] = {{"epsilon", jc.epsilon}, {"pairs", pairs}, {"directions", dirs}, {"ok", jc.ok()}};
            joint_ok = jc.ok();
        } catch (const PreconditionViolated& e) {
            o.result["joint_cause"] = {{"skipped", e.what()}};
        }

        if (!assumptions) {
            std::cerr << "weakch: model does not satisfy the assumptions (max residual " << worst << ")\n";
            o.exit_code = kExitValidation;
        } else if (weak.violated() || !joint_ok) {
            o.exit_code = kExitViolation;
        }
        return o;
    }

    CmdResult pairwise(const PairwiseCcModel& m, CmdResult o) const {
        const auto r = prop1_check(m);
        const auto& d = r.diagnostics;
        o.result = {{"kind", "pairwise"},
                    {"epsilon", r.epsilon},
                    {"p_a", r.p_a},
                    {"p_b", r.p_b},
                    {"p_c", r.p_c},
                    {"lower_bound", r.lower_bound},
                    {"upper_bound", r.upper_bound},
                    {"lower_ok", r.lower_ok},
                    {"upper_ok", r.upper_ok},
                    {"partition", {{"i1", r.partition.i1}, {"i2", r.partition.i2}, {"i3", r.partition.i3}}},
                    {"null_cells", r.null_cells},
                    {"max_screening_residual", r.max_screening_residual},
                    {"diagnostics",
                     {{"half_epsilon", d.half_epsilon},
                      {"sum_a_not_b", d.sum_a_not_b},
                      {"sum_b_not_a", d.sum_b_not_a},
                      {"i2_abs_diff", d.i2_abs_diff},
                      {"i2_split_mass", d.i2_split_mass},
                      {"i2_split_bound", d.i2_split_bound},
                      {"i2_weighted", d.i2_weighted},
                      {"i2_weighted_bound", d.i2_weighted_bound},
                      {"ok", r.diagnostics_ok()}}}};
        if (!r.ok()) o.exit_code = kExitViolation;
        return o;
    }
};

// ----------------------------------------------------------------- oracle

struct OracleCmd {
    std::vector<double> probs;

    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("oracle", "CH expression over a distribution on the 16 atoms of A, A', B, B'");
        c->add_option("--probs", probs, "16 probabilities, atom index 8A + 4A' + 2B + B'")->delimiter(',')->required();
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() const {
        if (probs.size() != 16) throw UsageError("--probs takes exactly 16 values");
        CmdResult o;
        o.inputs["probs"] = probs;
        std::array<double, 16> a{};
        std::copy(probs.begin(), probs.end(), a.begin());
        const auto r = ch_atom_oracle(a);
        o.result = {{"value", r.value}, {"identity_value", r.identity_value}, {"in_bounds", r.in_bounds}};
        if (!r.in_bounds) o.exit_code = kExitViolation;
        return o;
    }
};

// -------------------------------------------------------- optimize-angles

struct OptimizeCmd {
    std::string mode = "min";
    std::uint64_t seed = 0;
    std::size_t grid = 16;
    std::size_t refine = 200;

    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("optimize-angles", "Angles extremizing the singlet CH value");
        c->add_option("--mode", mode, "min (lower bound) or max (upper bound)")
            ->check(CLI::IsMember({"min", "max"}))
            ->capture_default_str();
        c->add_option("--seed", seed, "seed for the grid offset")->capture_default_str();
        c->add_option("--grid", grid, "coarse grid points per angle (>= 8)")->capture_default_str();
        c->add_option("--refine", refine, "refinement iterations")->capture_default_str();
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() const {
        CmdResult o;
        o.inputs = {{"mode", mode}, {"seed", seed}, {"grid", grid}, {"refine", refine}};
        const bool min = mode == "min";
        const auto r = optimize_angles(seed, grid, refine, min ? AngleMode::minimize : AngleMode::maximize);
        const double analytic = min ? kQuantumChMin : kQuantumChMax;
        o.result = angles_json(r.theta);
        o.result["value"] = r.value;
        o.result["analytic"] = analytic;
        o.result["abs_error"] = std::abs(r.value - analytic);
        o.result["evaluations"] = r.evaluations;
        return o;
    }
};

// ----------------------------------------------------------------- search

template <std::size_t N>
std::array<double, N> exact_list(const std::vector<double>& v, const char* name) {
    if (v.size() != N) throw UsageError(std::string(name) + " takes exactly " + std::to_string(N) + " values");
    std::array<double, N> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return a;
}

struct SearchCmd {
    SearchConfig cfg;
    std::vector<double> band{0.0, 0.05};
    std::vector<std::size_t> cards{2, 2, 2, 2};
    std::size_t stride = 100;

    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("search", "Local search for a common-cause model breaking strict but not weak CH (constraints bind the partner-direction causes only)");
        c->add_option("--seed", cfg.seed)->capture_default_str();
        c->add_option("--restarts", cfg.restarts)->capture_default_str();
        c->add_option("--eps-band", band, "lo,hi band for the model's epsilon")->delimiter(',')->capture_default_str();
        c->add_option("--cards", cards, "cause cardinalities n1,n2,n3,n4")->delimiter(',')->capture_default_str();
        c->add_option("--max-iters", cfg.max_iters, "iterations per restart")->capture_default_str();
        c->add_option("--step", cfg.step0, "initial step size")->capture_default_str();
        c->add_option("--decay", cfg.decay, "step decay per iteration")->capture_default_str();
        c->add_option("--penalty-weight", cfg.penalty_weight)->capture_default_str();
        c->add_option("--init-noise", cfg.init_noise, "weight of the random point in the start blend")
            ->capture_default_str();
        c->add_option("--threads", cfg.threads, "worker threads, 0 = hardware")->capture_default_str();
        c->add_option("--trace-stride", stride, "emit every n-th trace point")->capture_default_str();
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() {
        const auto b = exact_list<2>(band, "--eps-band");
        if (cards.size() != 4) throw UsageError("--cards takes exactly four values");
        if (stride < 1) throw UsageError("--trace-stride must be at least 1");
        cfg.eps_lo = b[0];
        cfg.eps_hi = b[1];
        std::copy(cards.begin(), cards.end(), cfg.cards.begin());

        CmdResult o;
        o.inputs = {{"seed", cfg.seed},
                    {"restarts", cfg.restarts},
                    {"eps_band", band},
                    {"cards", cards},
                    {"max_iters", cfg.max_iters},
                    {"step", cfg.step0},
                    {"decay", cfg.decay},
                    {"penalty_weight", cfg.penalty_weight},
                    {"init_noise", cfg.init_noise},
                    {"trace_stride", stride}};
        const auto r = search_counterexample(cfg);
        json trace = json::array();
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            if (i % stride == 0 || i + 1 == r.trace.size()) {
                trace.push_back({i, r.trace[i].penalty, r.trace[i].objective});
            }
        }
        o.result = {{"feasible", r.feasible},
                    {"restart", r.restart},
                    {"objective", r.objective},
                    {"penalty", r.penalty},
                    {"ch_value", r.ch_value},
                    {"eps_global", r.eps_global},
                    {"strict_violated", r.strict_violated},
                    {"weak_report", to_json(r.weak_report)},
                    {"trace_columns", {"iteration", "penalty", "objective"}},
                    {"trace", trace},
                    {"model", weakch::to_json(r.model)}};
        return o;
    }
};

// --------------------------------------------------------------- simulate

struct SimulateCmd {
    std::uint64_t seed = 0;
    std::uint64_t n = 1000000;
    std::vector<double> angles;
    bool degrees = false;
    std::string model_file;
    double epsilon = 0.0;
    double k_sigma = 3.0;
    std::vector<double> setting_probs{0.25, 0.25, 0.25, 0.25};
    unsigned threads = 0;

    void add(CLI::App& app, std::function<CmdResult()>& run) {
        auto* c = app.add_subcommand("simulate", "Monte Carlo runs and a k-sigma test of the weak CH inequality");
        c->add_option("--seed", seed)->capture_default_str();
        c->add_option("--n", n, "number of runs")->capture_default_str();
        c->add_option("--angles", angles, "theta1,theta2,theta3,theta4 for the singlet source")->delimiter(',');
        c->add_flag("--degrees", degrees, "angles are in degrees");
        c->add_option("--model", model_file, "sample from an eprb model file instead of the singlet");
        c->add_option("--epsilon", epsilon, "epsilon for the weak bounds")->capture_default_str();
        c->add_option("--k-sigma", k_sigma, "decision margin in standard errors")->capture_default_str();
        c->add_option("--setting-probs", setting_probs, "p(13),p(14),p(23),p(24)")
            ->delimiter(',')
            ->capture_default_str();
        c->add_option("--threads", threads, "worker threads, 0 = hardware")->capture_default_str();
        c->callback([this, &run] { run = [this] { return exec(); }; });
    }

    CmdResult exec() const {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.n = n;
        cfg.threads = threads;
        cfg.setting_probs = exact_list<4>(setting_probs, "--setting-probs");
        CmdResult o;
        o.inputs = {{"seed", seed}, {"n", n}, {"epsilon", epsilon}, {"k_sigma", k_sigma}, {"setting_probs", setting_probs}};
        if (!model_file.empty()) {
            cfg.model = load_eprb_model(model_file);
            o.inputs["model"] = model_file;
        } else {
            if (angles.empty()) throw UsageError("simulate needs --angles or --model");
            cfg.theta = parse_angles(angles, degrees);
            o.inputs["angles"] = angles;
            o.inputs["degrees"] = degrees;
        }

        const CountsTable t = sample_runs(cfg);
        const Estimates est = estimate(t);
        std::array<SettingProbs, 4> sp;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) sp[2 * a + b] = cfg.pair_probs(a, b);
        const auto r = test_inequality(est, epsilon, k_sigma, sp);

        json counts = json::array();
        std::ostringstream csv;
        csv << "alice_setting,bob_setting,alice_outcome,bob_outcome,count\n";
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) {
                        const auto c = t.counts[a][b][x][y];
                        const std::string xs = x == 0 ? "+" : "-", ys = y == 0 ? "+" : "-";
                        counts.push_back({{"a", a + 1}, {"b", b + 3}, {"x", xs}, {"y", ys}, {"count", c}});
                        csv << a + 1 << ',' << b + 3 << ',' << xs << ',' << ys << ',' << c << '\n';
                    }
        const auto term = [](const ProbEstimate& p) {
            return json{{"value", p.value()}, {"se", p.se()}, {"hits", p.hits}, {"trials", p.trials}};
        };
        o.result = {{"n", t.n},
                    {"counts", counts},
                    {"estimates",
                     {{"p13", term(est.joint[0][0][0][0])},
                      {"p14", term(est.joint[0][1][0][0])},
                      {"p24", term(est.joint[1][1][0][0])},
                      {"p23", term(est.joint[1][0][0][0])},
                      {"p1", term(est.alice_plus[0])},
                      {"p4", term(est.bob_plus[1])}}},
                    {"ch_estimate", r.report.value},
                    {"se", r.se},
                    {"lower", r.report.lower},
                    {"upper", r.report.upper},
                    {"margin_lower_sigma", r.margin_lower},
                    {"margin_upper_sigma", r.margin_upper},
                    {"k_sigma", r.k_sigma},
                    {"declared_lower", r.declared_lower},
                    {"declared_upper", r.declared_upper},
                    {"se_note", "marginal/joint subsample covariance ignored"}};
        o.csv = csv.str();
        if (r.declared()) o.exit_code = kExitViolation;
        return o;
    }
};

void emit(const std::string& command, const CmdResult& o, cli::Format fmt) {
    json env = {{"command", command}, {"inputs", o.inputs}, {"result", o.result}, {"version", WEAKCH_VERSION}};
    if (fmt == cli::Format::json) {
        cli::write_json(std::cout, env);
    } else if (o.csv) {
        std::cout << *o.csv;
    } else {
        cli::write_flat_csv(std::cout, env);
    }
}

void emit_error(const std::string& command, const std::string& type, const std::string& message, cli::Format fmt) {
    json env = {{"command", command},
                {"inputs", json::object()},
                {"error", {{"type", type}, {"message", message}}},
                {"version", WEAKCH_VERSION}};
    if (fmt == cli::Format::json) {
        cli::write_json(std::cout, env);
    } else {
        cli::write_flat_csv(std::cout, env);
    }
}

std::string error_type(const std::exception& e) {
#define WEAKCH_NAME(T) \
    if (dynamic_cast<const T*>(&e)) return #T;
    WEAKCH_NAME(BadModelFile)
    WEAKCH_NAME(UndefinedEstimate)
    WEAKCH_NAME(PreconditionViolated)
    WEAKCH_NAME(GenerationFailed)
    WEAKCH_NAME(UnnormalizedInput)
    WEAKCH_NAME(BadEpsilon)
    WEAKCH_NAME(BadSettingProbs)
    WEAKCH_NAME(MixedEpsilon)
    WEAKCH_NAME(UnnormalizedTable)
    WEAKCH_NAME(EmptySpace)
    WEAKCH_NAME(NegativeWeight)
    WEAKCH_NAME(ForeignEvent)
    WEAKCH_NAME(ZeroConditioner)
    WEAKCH_NAME(InvalidPartition)
#undef WEAKCH_NAME
    return "InvalidArgument";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weakch: singlet predictions, weak Clauser-Horne bounds and common-cause model checks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", WEAKCH_VERSION);

    std::string format = "json";
    if (const char* env = std::getenv("WEAKCH_FORMAT")) format = env;
    app.add_option("--format", format, "json or csv (default from WEAKCH_FORMAT)")
        ->check(CLI::IsMember({"json", "csv"}));

    std::function<CmdResult()> run;
    PredictCmd predict;
    BoundsCmd bounds;
    ThresholdsCmd thresholds;
    CheckCmd check;
    CheckModelCmd check_model;
    OracleCmd oracle;
    OptimizeCmd optimize;
    SearchCmd search;
    SimulateCmd simulate;
    predict.add(app, run);
    bounds.add(app, run);
    thresholds.add(app, run);
    check.add(app, run);
    check_model.add(app, run);
    oracle.add(app, run);
    optimize.add(app, run);
    search.add(app, run);
    simulate.add(app, run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "weakch: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        std::cerr << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }
    if (format != "json" && format != "csv") {
        std::cerr << "weakch: WEAKCH_FORMAT must be json or csv\n";
        return kExitUsage;
    }
    const cli::Format fmt = format == "csv" ? cli::Format::csv : cli::Format::json;
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const CmdResult o = run();
        emit(command, o, fmt);
        return o.exit_code;
    } catch (const UsageError& e) {
        std::cerr << "weakch " << command << ": " << e.what() << "\n\n" << app.get_subcommands().front()->help();
        return kExitUsage;
    } catch (const weakch::Error& e) {
        std::cerr << "weakch " << command << ": " << e.what() << '\n';
        emit_error(command, error_type(e), e.what(), fmt);
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "weakch " << command << ": " << e.what() << '\n';
        emit_error(command, error_type(e), e.what(), fmt);
        return kExitValidation;
    }
}
