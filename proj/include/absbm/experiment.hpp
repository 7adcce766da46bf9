#pragma once

#include <bit>
#include <fstream>
#include <map>

#include "absbm/baselines.hpp"
#include "absbm/em.hpp"
#include "absbm/generators.hpp"
#include "absbm/metrics.hpp"

namespace absbm {

enum class ExperimentKind { FourGroupSweepZout, FourGroupSweepSigma, RealNetworkSweepSigma, SingleRun };
enum class Method { BpEm, NaiveMf, KMeans };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::BpEm: return "bp-em";
        case Method::NaiveMf: return "naive-mf";
        case Method::KMeans: return "kmeans";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "bp-em") return Method::BpEm;
    if (s == "naive-mf") return Method::NaiveMf;
    if (s == "kmeans") return Method::KMeans;
    throw validation_error("unknown method: " + s);
}

inline const char* experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::FourGroupSweepZout: return "four-group-sweep-zout";
        case ExperimentKind::FourGroupSweepSigma: return "four-group-sweep-sigma";
        case ExperimentKind::RealNetworkSweepSigma: return "real-network-sweep-sigma";
        case ExperimentKind::SingleRun: return "single-run";
    }
    return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    if (s == "four-group-sweep-zout") return ExperimentKind::FourGroupSweepZout;
    if (s == "four-group-sweep-sigma") return ExperimentKind::FourGroupSweepSigma;
    if (s == "real-network-sweep-sigma") return ExperimentKind::RealNetworkSweepSigma;
    if (s == "single-run") return ExperimentKind::SingleRun;
    throw validation_error("unknown experiment kind: " + s);
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SingleRun;
    std::vector<double> z_out_values;  // four-group-sweep-zout points
    std::vector<double> sigma_values;  // *-sweep-sigma points
    double sigma = 1.0;                // attribute noise when not swept
    double z_out = 3.0;                // four-group difficulty when not swept
    int trials = 100;
    std::vector<Method> methods{Method::BpEm};
    std::uint64_t base_seed = 1;
    std::string dataset_path;  // GML file for real-network experiments
    double mu_gap = 10.0;      // mu_l = mu_gap * l
    int L_max = 4;             // overridden by ground truth for real networks
    DetectConfig solver;

    void validate() const {
        if (trials < 1) throw validation_error("trials must be >= 1");
        if (methods.empty()) throw validation_error("no methods selected");
        if (kind == ExperimentKind::FourGroupSweepZout && z_out_values.empty())
            throw validation_error("empty z_out sweep");
        if ((kind == ExperimentKind::FourGroupSweepSigma ||
             kind == ExperimentKind::RealNetworkSweepSigma) &&
            sigma_values.empty())
            throw validation_error("empty sigma sweep");
        if (kind == ExperimentKind::RealNetworkSweepSigma && dataset_path.empty())
            throw validation_error("real-network sweep requires a dataset");
    }
};

struct TrialRecord {
    Method method;
    double sweep_value = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    bool converged = true;
    int iterations = 0;
    double accuracy = 0.0;
    double modularity = 0.0;
    double truth_modularity = 0.0;
};

struct SummaryRow {
    Method method;
    double sweep_value = 0.0;
    int trials = 0;
    int failures = 0;
    int nonconverged = 0;
    double mean_accuracy = 0.0, se_accuracy = 0.0;
    double mean_modularity = 0.0, se_modularity = 0.0;
    double mean_truth_modularity = 0.0, se_truth_modularity = 0.0;
};

struct ExperimentResults {
    ExperimentConfig config;
    std::string sweep_param;  // "z_out" or "sigma"
    std::vector<TrialRecord> trials;
    std::vector<SummaryRow> summary;
};

// Trial seeds depend on (base seed, sweep point, trial index, method) only,
// so growing the trial count never reshuffles earlier trials.
inline std::uint64_t trial_seed(std::uint64_t base, double sweep_value, int trial, Method method) {
    std::uint64_t h = mix64(base);
    h = hash_combine(h, std::bit_cast<std::uint64_t>(sweep_value));
    h = hash_combine(h, static_cast<std::uint64_t>(trial));
    h = hash_combine(h, static_cast<std::uint64_t>(method));
    return h;
}

namespace detail {

inline ModelParams attribute_params(int L, double mu_gap, double sigma) {
    ModelParams p;
    p.gamma.assign(static_cast<std::size_t>(L), 1.0 / L);
    p.gamma_prime = Matrix(static_cast<std::size_t>(L), static_cast<std::size_t>(L), 0.0);
    p.mu.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) p.mu[static_cast<std::size_t>(l)] = mu_gap * l;
    p.sigma.assign(static_cast<std::size_t>(L), sigma);
    return p;
}

inline void summarize(ExperimentResults& res) {
    std::map<std::pair<std::string, double>, std::vector<const TrialRecord*>> groups;
    for (const auto& t : res.trials)
        groups[{method_name(t.method), t.sweep_value}].push_back(&t);
    res.summary.clear();
    for (const auto& [key, recs] : groups) {
        SummaryRow row;
        row.method = recs.front()->method;
        row.sweep_value = key.second;
        row.trials = static_cast<int>(recs.size());
        std::vector<double> acc, mod, tmod;
        for (const auto* r : recs) {
            if (r->failed) {
                ++row.failures;
                continue;
            }
            if (!r->converged) ++row.nonconverged;
            acc.push_back(r->accuracy);
            mod.push_back(r->modularity);
            tmod.push_back(r->truth_modularity);
        }
        auto mean_se = [](const std::vector<double>& xs, double& mean, double& se) {
            if (xs.empty()) {
                mean = se = 0.0;
                return;
            }
            mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - mean) * (x - mean);
            if (xs.size() > 1) {
                var /= static_cast<double>(xs.size() - 1);
                se = std::sqrt(var / static_cast<double>(xs.size()));
            } else {
                se = 0.0;
            }
        };
        mean_se(acc, row.mean_accuracy, row.se_accuracy);
        mean_se(mod, row.mean_modularity, row.se_modularity);
        mean_se(tmod, row.mean_truth_modularity, row.se_truth_modularity);
        res.summary.push_back(row);
    }
}

}  // namespace detail

// Runs every (sweep point, method, trial) cell. Attributes are regenerated
// each trial; the network too for synthetic experiments. A trial that
// throws is recorded as failed and excluded from the means.
inline ExperimentResults run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResults res;
    res.config = cfg;

    const bool sweep_zout = cfg.kind == ExperimentKind::FourGroupSweepZout;
    res.sweep_param = sweep_zout ? "z_out" : "sigma";
    std::vector<double> points;
    switch (cfg.kind) {
        case ExperimentKind::FourGroupSweepZout: points = cfg.z_out_values; break;
        case ExperimentKind::FourGroupSweepSigma:
        case ExperimentKind::RealNetworkSweepSigma: points = cfg.sigma_values; break;
        case ExperimentKind::SingleRun: points = {cfg.sigma}; break;
    }

    const bool real = cfg.kind == ExperimentKind::RealNetworkSweepSigma ||
                      (cfg.kind == ExperimentKind::SingleRun && !cfg.dataset_path.empty());
    AttributedNetwork base_net;
    GroundTruth base_truth;
    int L_max = cfg.L_max;
    if (real) {
        std::ifstream in(cfg.dataset_path);
        if (!in) throw io_error("cannot open dataset: " + cfg.dataset_path);
        auto gml = parse_gml(in);
        if (!gml.truth) throw validation_error("dataset has no ground-truth labels");
        base_net = std::move(gml.network);
        base_truth = std::move(*gml.truth);
        L_max = base_truth.n_labels();
    }

    for (double point : points) {
        double z_out = sweep_zout ? point : cfg.z_out;
        double sigma = sweep_zout ? cfg.sigma : point;
        for (Method method : cfg.methods) {
            for (int trial = 0; trial < cfg.trials; ++trial) {
                TrialRecord rec;
                rec.method = method;
                rec.sweep_value = point;
                rec.trial = trial;
                rec.seed = trial_seed(cfg.base_seed, point, trial, method);
                try {
                    AttributedNetwork net;
                    GroundTruth truth;
                    if (real) {
                        net = base_net;
                        truth = base_truth;
                    } else {
                        auto fg = sample_four_group(z_out, hash_combine(rec.seed, 1));
                        net = std::move(fg.network);
                        truth = std::move(fg.truth);
                    }
                    auto attr_params = detail::attribute_params(L_max, cfg.mu_gap, sigma);
                    net.set_attributes(sample_attributes(truth, attr_params, hash_combine(rec.seed, 2)));

                    GroundTruth predicted;
                    std::uint64_t solver_seed = hash_combine(rec.seed, 3);
                    switch (method) {
                        case Method::BpEm: {
                            auto r = detect(net, L_max, cfg.solver, solver_seed);
                            predicted = std::move(r.labels);
                            rec.converged = r.converged;
                            rec.iterations = r.iterations;
                            break;
                        }
                        case Method::NaiveMf: {
                            auto r = detect_naive_mf(net, L_max, cfg.solver, solver_seed);
                            predicted = std::move(r.labels);
                            rec.converged = r.converged;
                            rec.iterations = r.iterations;
                            break;
                        }
                        case Method::KMeans:
                            predicted = detect_kmeans_only(net.attributes(), L_max, solver_seed);
                            break;
                    }
                    rec.accuracy = accuracy(predicted, truth, L_max).accuracy;
                    rec.modularity = modularity(predicted, net);
                    rec.truth_modularity = modularity(truth, net);
                } catch (const std::exception&) {
                    rec.failed = true;
                }
                res.trials.push_back(rec);
            }
        }
    }
    detail::summarize(res);
    return res;
}

// ---------------------------------------------------------------------------
// Report output: a summary CSV (one row per sweep point per method) and a
// plot-ready long CSV with one row per trial. Schemas are versioned in the
// first header line of each file.

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

inline void emit_report(const ExperimentResults& res, std::ostream& summary_out,
                        std::ostream& trials_out) {
    if (res.trials.empty()) throw validation_error("no results to report");
    summary_out << "# absbm-sweep-summary v1\n";
    summary_out << "method,sweep_param,sweep_value,trials,failures,nonconverged,"
                   "mean_accuracy,se_accuracy,mean_modularity,se_modularity,"
                   "mean_truth_modularity,se_truth_modularity\n";
    for (const auto& r : res.summary) {
        summary_out << method_name(r.method) << ',' << res.sweep_param << ','
                    << detail::fmt(r.sweep_value) << ',' << r.trials << ',' << r.failures << ','
                    << r.nonconverged << ',' << detail::fmt(r.mean_accuracy) << ','
                    << detail::fmt(r.se_accuracy) << ',' << detail::fmt(r.mean_modularity) << ','
                    << detail::fmt(r.se_modularity) << ',' << detail::fmt(r.mean_truth_modularity)
                    << ',' << detail::fmt(r.se_truth_modularity) << '\n';
    }

    trials_out << "# absbm-sweep-trials v1\n";
    trials_out << "method,sweep_param,sweep_value,trial,seed,failed,converged,iterations,"
                  "accuracy,modularity,truth_modularity\n";
    for (const auto& t : res.trials) {
        trials_out << method_name(t.method) << ',' << res.sweep_param << ','
                   << detail::fmt(t.sweep_value) << ',' << t.trial << ',' << t.seed << ','
                   << (t.failed ? 1 : 0) << ',' << (t.converged ? 1 : 0) << ',' << t.iterations
                   << ',' << detail::fmt(t.accuracy) << ',' << detail::fmt(t.modularity) << ','
                   << detail::fmt(t.truth_modularity) << '\n';
    }
}

inline void emit_report_files(const ExperimentResults& res, const std::string& out_dir) {
    std::ofstream summary(out_dir + "/summary.csv");
    std::ofstream trials(out_dir + "/trials.csv");
    if (!summary || !trials) throw io_error("cannot write report files under " + out_dir);
    emit_report(res, summary, trials);
}

// ---------------------------------------------------------------------------
// Config files: flat "key = value" lines grouped by [section] headers.
// Sections: [experiment] and [solver]. Lists are comma-separated.

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.methods.clear();
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (section == "experiment" || section.empty()) {
            if (key == "kind") cfg.kind = parse_experiment_kind(val);
            else if (key == "z_out_values") cfg.z_out_values = detail::parse_double_list(val);
            else if (key == "sigma_values") cfg.sigma_values = detail::parse_double_list(val);
            else if (key == "sigma") cfg.sigma = std::stod(val);
            else if (key == "z_out") cfg.z_out = std::stod(val);
            else if (key == "trials") cfg.trials = std::stoi(val);
            else if (key == "seed") cfg.base_seed = std::stoull(val);
            else if (key == "dataset") cfg.dataset_path = val;
            else if (key == "mu_gap") cfg.mu_gap = std::stod(val);
            else if (key == "L_max") cfg.L_max = std::stoi(val);
            else if (key == "methods") {
                std::istringstream ms(val);
                std::string tok;
                while (std::getline(ms, tok, ','))
                    if (!detail::trim(tok).empty()) cfg.methods.push_back(parse_method(detail::trim(tok)));
            } else {
                throw parse_error("config line " + std::to_string(line_no) + ": unknown key " + key);
            }
        } else if (section == "solver") {
            if (key == "tol") cfg.solver.tol = std::stod(val);
            else if (key == "max_iterations") cfg.solver.max_iterations = std::stoi(val);
            else if (key == "damping") cfg.solver.damping = std::stod(val);
            else if (key == "n_restarts") cfg.solver.n_restarts = std::stoi(val);
            else if (key == "sigma0") cfg.solver.sigma0 = std::stod(val);
            else if (key == "schedule") {
                if (val == "fixed") cfg.solver.schedule = Schedule::Fixed;
                else if (val == "random") cfg.solver.schedule = Schedule::RandomPermutation;
                else throw parse_error("config line " + std::to_string(line_no) + ": unknown schedule");
            } else {
                throw parse_error("config line " + std::to_string(line_no) + ": unknown key " + key);
            }
        } else {
            throw parse_error("config line " + std::to_string(line_no) + ": unknown section " + section);
        }
    }
    if (cfg.methods.empty()) cfg.methods.push_back(Method::BpEm);
    return cfg;
}

}  // namespace absbm
