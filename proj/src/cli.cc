// Copyright 2026 The qrep Authors
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

#include "qrep/cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qrep/analysis.h"
#include "qrep/config.h"
#include "qrep/monte_carlo.h"
#include "qrep/oracle.h"
#include "qrep/repeater.h"

using namespace qrep;

namespace {

constexpr double REFERENCE_TOTAL_TIME_S = 3 * 3600.0;
constexpr double REFERENCE_PROB_F = 0.85;

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

void kv(std::ostream &o, const std::string &key, const std::string &value) {
    o << key << " = " << value << "\n";
}

void kv(std::ostream &o, const std::string &key, double value) {
    kv(o, key, num(value));
}

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

/// Repeater-parameter flags shared by several subcommands; each mirrors a config key.
struct ParamFlags {
    std::string config_path;
    CLI::Option *config_opt = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> opts;

    void attach(CLI::App *app, bool config_required) {
        config_opt = app->add_option("--config", config_path, "Config file of `key = value` lines");
        if (config_required) {
            config_opt->required();
        }
        for (const auto &key : config_keys()) {
            opts[key] = app->add_option("--" + dashed(key), values[key], "Overrides config key " + key);
        }
    }

    RunConfig resolve(RunConfig base) const {
        if (!config_path.empty()) {
            apply_config(base, load_config(config_path));
        }
        ConfigMap overrides;
        for (const auto &[key, opt] : opts) {
            if (opt->count() > 0) {
                overrides[key] = values.at(key);
            }
        }
        apply_config(base, overrides);
        return base;
    }
};

void print_state(std::ostream &o, const BranchEnsemble &state, const std::string &indent) {
    oracle::Basis basis(state.modes(), state.n_max());
    auto rho = oracle::density(state, basis);
    auto v = oracle::dominant_state(rho / rho.trace().real());
    std::ostringstream lines;
    oracle::write_golden(lines, basis, v);
    std::istringstream in(lines.str());
    std::string line;
    while (std::getline(in, line)) {
        o << indent << line << "\n";
    }
    double purity = (rho * rho).trace().real() / std::pow(rho.trace().real(), 2);
    if (purity < 1 - 1e-12) {
        o << indent << "# mixed state, purity " << num(purity) << "; dominant component shown\n";
    }
}

void print_pair(std::ostream &o, const PairState &p, const std::string &indent) {
    o << indent << "sectors p2=" << num(p.p2) << " p1=" << num(p.p1) << " p0=" << num(p.p0) << " ph=" << num(p.ph)
      << " F=" << num(p.F) << "\n";
}

void report_outcomes(std::ostream &o, const std::vector<DetectionOutcome> &outcomes, std::ostream *golden) {
    double accepted = 0;
    for (const auto &oc : outcomes) {
        o << "pattern " << oc.pattern_str() << " probability " << num(oc.probability)
          << (oc.accepted ? " accepted" : "") << "\n";
        if (!oc.accepted || oc.post_state.empty()) {
            continue;
        }
        accepted += oc.probability;
        print_state(o, oc.post_state, "  ");
        print_pair(o, classify(oc.post_state), "  ");
        if (golden) {
            *golden << "# pattern " << oc.pattern_str() << " probability " << num(oc.probability) << "\n";
            print_state(*golden, oc.post_state, "");
        }
    }
    kv(o, "accepted_probability", accepted);
}

struct DeriveArgs {
    std::string circuit;
    double chi = 0.01;
    double eta = 1;
    double eta_r = 1;
    double transmittance = 1;
    bool threshold = false;
    bool ideal = false;
    int nmax = 4;
    double F = 0.88;
    std::string out;
};

int run_derive(const DeriveArgs &a, std::ostream &out) {
    DetectorModel det{a.eta, !a.threshold};
    double eta_r = a.eta_r, t = a.transmittance;
    if (a.ideal) {
        det = DetectorModel::ideal();
        eta_r = 1;
        t = 1;
    }
    std::ofstream golden_file;
    std::ostream *golden = nullptr;
    if (!a.out.empty()) {
        golden_file.open(a.out);
        if (!golden_file) {
            throw std::invalid_argument("cannot write '" + a.out + "'");
        }
        golden = &golden_file;
    }

    EnsembleParams ep;
    ep.chi = a.chi;
    ep.truncation_order = std::max(2, a.nmax / 2);
    ep.validate();
    if (auto w = ep.warning()) {
        out << "# warning: " << *w << "\n";
    }
    Bsm1Config c1;
    c1.link_transmittance = t;
    c1.detector = det;
    auto gen = bsm1(write_memory_qubit(ep, 0, a.nmax), write_memory_qubit(ep, 1, a.nmax), c1);
    if (a.circuit == "bsm1") {
        report_outcomes(out, gen, golden);
        return EXIT_OK;
    }
    if (a.circuit == "bsm2") {
        auto [pair, p] = accepted_mixture(gen);
        if (pair.empty()) {
            throw std::domain_error("generation never succeeds for these parameters");
        }
        std::map<ModeLabel, ModeLabel> move;
        for (auto e : {Ensemble::u, Ensemble::d}) {
            move[ModeLabel::atomic(0, e)] = ModeLabel::atomic(2, e);
            move[ModeLabel::atomic(1, e)] = ModeLabel::atomic(3, e);
        }
        Bsm2Config c2;
        c2.retrieval.eta_r = eta_r;
        c2.detector = det;
        c2.arm_transmittance = t;
        out << "# inputs: corrected generation output on A-B and C-D (generation probability " << num(p) << ")\n";
        report_outcomes(out, bsm2(pair, relabel(pair, move), c2), golden);
        return EXIT_OK;
    }
    PurifyConfig pc;
    pc.retrieval.eta_r = eta_r;
    pc.detector = det;
    auto pair = dephased_pair(a.F, 0, 1, a.nmax);
    auto r = purify(pair, pair, pc);
    out << "# inputs: two copies of F|phi+><phi+| + (1-F)|psi+><psi+| with F = " << num(a.F) << "\n";
    for (const auto &oc : r.outcomes) {
        out << "pattern " << oc.pattern_str() << " probability " << num(oc.probability)
            << (oc.accepted ? " accepted" : "") << "\n";
    }
    if (r.success_probability > 0) {
        print_state(out, r.state, "  ");
        print_pair(out, r.pair, "  ");
        if (golden) {
            *golden << "# purified pair, success probability " << num(r.success_probability) << "\n";
            print_state(*golden, r.state, "");
        }
    }
    kv(out, "success_probability", r.success_probability);
    kv(out, "F_purified", r.pair.F);
    kv(out, "F_analytic", purified_fidelity(a.F));
    return EXIT_OK;
}

void print_plan(std::ostream &o, const RunConfig &run, const ChainPlan &plan) {
    const auto &p = run.params;
    kv(o, "chi_effective", p.chi_value());
    kv(o, "L_att_km", p.attenuation_length());
    kv(o, "total_length_km", p.total_length());
    kv(o, "T_cc_s", plan.T_cc);
    kv(o, "p_gen", plan.p_gen);
    kv(o, "T0_s", generation_time(p));
    for (size_t j = 1; j < plan.p_swap.size(); j++) {
        kv(o, "p_swap_" + std::to_string(j), plan.p_swap[j]);
    }
    for (size_t k = 0; k < plan.purification.size(); k++) {
        const auto &s = plan.purification[k];
        std::string tag = "purification_" + std::to_string(k + 1);
        kv(o, tag + "_level", s.level);
        kv(o, tag + "_success_probability", s.success_probability);
        kv(o, tag + "_F", s.pair.F);
        kv(o, tag + "_p2", s.pair.p2);
    }
    kv(o, "final_p2", plan.final_pair.p2);
    kv(o, "final_p1", plan.final_pair.p1);
    kv(o, "final_p0", plan.final_pair.p0);
    kv(o, "final_F", plan.final_pair.F);
    std::vector<double> ps(plan.p_swap.begin() + 1, plan.p_swap.end());
    kv(o, "T_recursion_s", timing_recursion(p, ps).T_tot);
}

void print_summary(std::ostream &o, const MonteCarloSummary &s) {
    kv(o, "trials", (double)s.trials);
    kv(o, "mean_T_s", s.mean_T);
    kv(o, "sem_T_s", s.sem_T);
    kv(o, "median_T_s", s.median_T);
    kv(o, "mean_T_h", s.mean_T / 3600);
    kv(o, "mean_final_F", s.mean_F);
    kv(o, "prob_F_ge_" + num(s.F_threshold), s.prob_F_at_least);
    kv(o, "mean_generation_attempts", s.mean_generation_attempts);
    kv(o, "mean_swap_failures", s.mean_swap_failures);
}

// Runs the Monte Carlo; the CSV goes to `csv_path` (or `out`), the summary to `out` (or `err`).
int run_simulation(const RunConfig &run, const std::string &csv_path, bool scenario, std::ostream &out, std::ostream &err) {
    auto plan = plan_chain(run.params);
    auto records = monte_carlo(plan, run.params, run.trials);
    std::ostream *summary = &out;
    if (csv_path.empty()) {
        write_csv(out, records);
        summary = &err;
    } else {
        std::ofstream f(csv_path);
        if (!f) {
            throw std::invalid_argument("cannot write '" + csv_path + "'");
        }
        write_csv(f, records);
    }
    auto s = summarize(records);
    std::ostream &o = *summary;
    o << "# parameters\n" << describe(run);
    o << "# chain plan\n";
    print_plan(o, run, plan);
    o << "# monte carlo\n";
    print_summary(o, s);
    if (scenario) {
        o << "# comparison with the published scenario\n";
        kv(o, "reference_T_s", REFERENCE_TOTAL_TIME_S);
        kv(o, "ratio_mean_T_to_reference", s.mean_T / REFERENCE_TOTAL_TIME_S);
        bool within = s.mean_T >= REFERENCE_TOTAL_TIME_S / 10 && s.mean_T <= REFERENCE_TOTAL_TIME_S * 10;
        kv(o, "within_one_order_of_magnitude", within ? "yes" : "no");
        kv(o, "reference_prob_F_ge_0.95", REFERENCE_PROB_F);
        kv(o, "simulated_prob_F_ge_0.95", s.prob_F_at_least);
    }
    return EXIT_OK;
}

struct SweepArgs {
    std::string param;
    double from = 0;
    double to = 0;
    int steps = 5;
    std::string out;
};

int run_sweep(const RunConfig &base, const SweepArgs &a, std::ostream &out) {
    const auto &keys = config_keys();
    if (std::find(keys.begin(), keys.end(), a.param) == keys.end()) {
        throw std::invalid_argument("unknown sweep parameter '" + a.param + "'");
    }
    if (a.steps < 1) {
        throw std::invalid_argument("steps must be at least 1");
    }
    std::ofstream file;
    std::ostream *o = &out;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) {
            throw std::invalid_argument("cannot write '" + a.out + "'");
        }
        o = &file;
    }
    *o << "param,value,T0_s,T_recursion_s,mean_T_s,sem_T_s,prob_F_ge_0.95,final_p2,final_F\n";
    for (int k = 0; k < a.steps; k++) {
        double v = a.steps == 1 ? a.from : a.from + (a.to - a.from) * k / (a.steps - 1);
        RunConfig run = base;
        apply_config(run, {{a.param, num(v)}});
        auto plan = plan_chain(run.params);
        std::vector<double> ps(plan.p_swap.begin() + 1, plan.p_swap.end());
        auto s = summarize(monte_carlo(plan, run.params, run.trials));
        *o << a.param << "," << num(v) << "," << num(generation_time(run.params)) << ","
           << num(timing_recursion(run.params, ps).T_tot) << "," << num(s.mean_T) << "," << num(s.sem_T) << ","
           << num(s.prob_F_at_least) << "," << num(plan.final_pair.p2) << "," << num(plan.final_pair.F) << "\n";
    }
    return EXIT_OK;
}

int run_scaling(const RunConfig &base, const std::vector<int> &levels, std::ostream &out) {
    std::vector<double> L, T;
    out << "L_km,j,T_closed_form_s,T_product_form_s,T_recursion_s\n";
    double p = swap_success_prob_approx(base.params);
    for (int j : levels) {
        RunConfig run = base;
        run.params.j_max = j;
        run.params.purification_rounds.clear();
        run.params.validate();
        double Lj = run.params.total_length();
        std::vector<double> ps((size_t)j, p);
        double closed = total_time_closed_form(run.params, Lj, p);
        out << num(Lj) << "," << j << "," << num(closed) << ","
            << num(total_time_product_form(generation_time(run.params), ps)) << ","
            << num(timing_recursion(run.params, ps).T_tot) << "\n";
        L.push_back(Lj);
        T.push_back(closed);
    }
    auto fit = scaling_fit(L, T);
    kv(out, "p", p);
    kv(out, "fitted_exponent", fit.slope);
    kv(out, "fit_residual", fit.residual);
    kv(out, "expected_exponent", base.params.chi > 0 ? std::log2(1 / p) : scaling_exponent(p));
    return EXIT_OK;
}

}  // namespace

int qrep::run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Robust two-photon-interference quantum repeater simulator", "qrep"};
    app.require_subcommand(1);

    DeriveArgs derive_args;
    auto *derive = app.add_subcommand("derive", "Conditional states of one station, per detection pattern");
    derive->add_option("circuit", derive_args.circuit, "bsm1, bsm2 or purify")
        ->required()
        ->check(CLI::IsMember({"bsm1", "bsm2", "purify"}));
    derive->add_option("--chi", derive_args.chi, "Excitation probability per write");
    derive->add_option("--eta", derive_args.eta, "Detector efficiency");
    derive->add_option("--eta-r", derive_args.eta_r, "Retrieval efficiency");
    derive->add_option("--transmittance", derive_args.transmittance, "Link (bsm1) or arm (bsm2) transmittance");
    derive->add_flag("--threshold", derive_args.threshold, "Threshold instead of number-resolving detectors");
    derive->add_flag("--ideal", derive_args.ideal, "Unit efficiencies, no loss, number-resolving detectors");
    derive->add_option("--nmax", derive_args.nmax, "Excitation bound of the joint state")->check(CLI::Range(2, 24));
    derive->add_option("--F", derive_args.F, "Input fidelity for purify")->check(CLI::Range(0.0, 1.0));
    derive->add_option("--out", derive_args.out, "Write accepted states in golden-file format");

    ParamFlags sim_flags;
    std::string sim_out;
    auto *simulate = app.add_subcommand("simulate", "Monte Carlo of the nested repeater");
    sim_flags.attach(simulate, true);
    simulate->add_option("--out", sim_out, "CSV output file (default: stdout)");

    ParamFlags sweep_flags;
    SweepArgs sweep_args;
    auto *sweep = app.add_subcommand("sweep", "Vary one parameter over a linear grid");
    sweep_flags.attach(sweep, false);
    sweep->add_option("--param", sweep_args.param, "Config key to vary")->required();
    sweep->add_option("--from", sweep_args.from, "First value")->required();
    sweep->add_option("--to", sweep_args.to, "Last value")->required();
    sweep->add_option("--steps", sweep_args.steps, "Number of grid points");
    sweep->add_option("--out", sweep_args.out, "CSV output file (default: stdout)");

    ParamFlags scen_flags;
    std::string scen_name, scen_out;
    auto *scenario = app.add_subcommand("scenario", "Run a preset scenario");
    scenario->add_option("name", scen_name, "Preset name")->required()->check(CLI::IsMember({"paper"}));
    scen_flags.attach(scenario, false);
    scenario->add_option("--out", scen_out, "CSV output file (default: stdout)");

    auto *analyze = app.add_subcommand("analyze", "Derived analyses");
    analyze->require_subcommand(1);
    double wavelength = 1e-6, tolerance = 3;
    auto *stability = analyze->add_subcommand("stability", "Path-stability gain in orders of magnitude");
    stability->add_option("--wavelength-m", wavelength, "Optical wavelength");
    stability->add_option("--tolerance-m", tolerance, "Tolerated path-length drift");
    ParamFlags scaling_flags;
    std::vector<int> levels{4, 5, 6, 7};
    auto *scaling = analyze->add_subcommand("scaling", "Distance exponent of the total time");
    scaling_flags.attach(scaling, false);
    scaling->add_option("--levels", levels, "Connection levels to evaluate")->delimiter(',');
    double ek_p2 = 1, ek_F = 1;
    double ek_p1 = -1;
    auto *ekert = analyze->add_subcommand("ekert", "Post-selected correlations of an effective pair");
    ekert->add_option("--p2", ek_p2, "Entangled-sector weight")->check(CLI::Range(0.0, 1.0));
    ekert->add_option("--p1", ek_p1, "Single-excitation weight (default: half the remainder)");
    ekert->add_option("--F", ek_F, "Entangled-sector fidelity")->check(CLI::Range(0.0, 1.0));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return EXIT_OK;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return EXIT_OK;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return EXIT_INVALID_INPUT;
    }

    try {
        if (derive->parsed()) {
            return run_derive(derive_args, out);
        }
        if (simulate->parsed()) {
            return run_simulation(sim_flags.resolve(RunConfig{}), sim_out, false, out, err);
        }
        if (sweep->parsed()) {
            RunConfig base;
            base.trials = 200;
            return run_sweep(sweep_flags.resolve(base), sweep_args, out);
        }
        if (scenario->parsed()) {
            return run_simulation(scen_flags.resolve(published_preset()), scen_out, true, out, err);
        }
        if (stability->parsed()) {
            kv(out, "wavelength_m", wavelength);
            kv(out, "tolerance_m", tolerance);
            kv(out, "orders_of_magnitude", stability_ratio(wavelength, tolerance));
            return EXIT_OK;
        }
        if (scaling->parsed()) {
            return run_scaling(scaling_flags.resolve(published_preset()), levels, out);
        }
        if (ekert->parsed()) {
            PairState p;
            p.p2 = ek_p2;
            p.p1 = ek_p1 >= 0 ? ek_p1 : (1 - ek_p2) / 2;
            p.p0 = 1 - p.p2 - p.p1;
            p.F = ek_F;
            if (p.p0 < -1e-12) {
                throw std::invalid_argument("p2 + p1 exceeds 1");
            }
            p.p0 = std::max(0.0, p.p0);
            auto r = ekert_check(effective_pair(p, 0, 1));
            if (!r.has_coincidences) {
                out << "no coincidences\n";
                return EXIT_OK;
            }
            kv(out, "coincidence_probability_hv", r.coincidence_hv);
            kv(out, "coincidence_probability_pm", r.coincidence_pm);
            kv(out, "correlation_hv", r.correlation_hv);
            kv(out, "correlation_pm", r.correlation_pm);
            return EXIT_OK;
        }
    } catch (const ResourceError &e) {
        err << "resource limit: " << e.what() << "\n";
        return EXIT_RESOURCE_LIMIT;
    } catch (const std::bad_alloc &) {
        err << "resource limit: out of memory\n";
        return EXIT_RESOURCE_LIMIT;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_INVALID_INPUT;
    }
    err << app.help();
    return EXIT_INVALID_INPUT;
}
