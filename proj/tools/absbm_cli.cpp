// Command-line front end: dataset generation, single detection runs,
// experiment sweeps and label evaluation.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "absbm/absbm.hpp"

namespace {

struct LoadedDataset {
    absbm::AttributedNetwork network;
    std::optional<absbm::GroundTruth> truth;
};

LoadedDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw absbm::io_error("cannot open dataset: " + path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".gml") {
        auto gml = absbm::parse_gml(in);
        return {std::move(gml.network), std::move(gml.truth)};
    }
    return {absbm::parse_edge_list(in), std::nullopt};
}

void write_beliefs_csv(std::ostream& out, const std::vector<double>& beliefs, std::size_t L) {
    out << "vertex_id";
    for (std::size_t l = 0; l < L; ++l) out << ",b" << l;
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i * L < beliefs.size(); ++i) {
        out << i;
        for (std::size_t l = 0; l < L; ++l) {
            std::snprintf(buf, sizeof(buf), "%.12g", beliefs[i * L + l]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Community detection on attributed networks"};
    app.require_subcommand(1);

    // --- generate ---------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "Sample a four-group benchmark network");
    double gen_zout = 3.0, gen_sigma = 1.0, gen_mu_gap = 10.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "sample";
    gen->add_option("--zout", gen_zout, "Expected inter-community degree, in [0,16]");
    gen->add_option("--sigma", gen_sigma, "Attribute noise");
    gen->add_option("--mu-gap", gen_mu_gap, "Spacing of the attribute means");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "Output file prefix");

    // --- detect -----------------------------------------------------------
    auto* det = app.add_subcommand("detect", "Run community detection on one dataset");
    std::string det_dataset, det_attrs, det_out, det_method = "bp-em", det_schedule = "fixed";
    int det_L = 0;
    std::uint64_t det_seed = 1;
    double det_gen_sigma = -1.0, det_mu_gap = 10.0;
    absbm::DetectConfig det_cfg;
    det->add_option("--dataset", det_dataset, "Edge list or GML file")->required();
    det->add_option("--attributes", det_attrs, "Attribute CSV (vertex_id,value)");
    det->add_option("--gen-attr-sigma", det_gen_sigma,
                    "Synthesize attributes from GML truth labels with this sigma");
    det->add_option("--mu-gap", det_mu_gap, "Mean spacing for synthesized attributes");
    det->add_option("-L,--L-max", det_L, "Number of communities (default: from truth labels)");
    det->add_option("--method", det_method, "bp-em | naive-mf | kmeans");
    det->add_option("--seed", det_seed, "RNG seed");
    det->add_option("--out", det_out, "Output prefix for labels/beliefs CSV");
    det->add_option("--tol", det_cfg.tol, "Convergence tolerance");
    det->add_option("--max-iterations", det_cfg.max_iterations, "Iteration cap");
    det->add_option("--damping", det_cfg.damping, "Message damping in [0,1)");
    det->add_option("--restarts", det_cfg.n_restarts, "Independent restarts");
    det->add_option("--sigma0", det_cfg.sigma0, "Initial sigma");
    det->add_option("--schedule", det_schedule, "fixed | random");

    // --- sweep ------------------------------------------------------------
    auto* swp = app.add_subcommand("sweep", "Run an experiment sweep");
    std::string swp_config, swp_out = ".", swp_dataset, swp_kind;
    std::vector<std::string> swp_methods;
    int swp_trials = -1;
    std::uint64_t swp_seed = 0;
    bool swp_seed_set = false;
    swp->add_option("--config", swp_config, "Config file ([experiment]/[solver] key=value)");
    swp->add_option("--experiment", swp_kind, "Experiment kind (overrides config)");
    swp->add_option("--trials", swp_trials, "Trials per sweep point (overrides config)");
    swp->add_option("--seed", swp_seed, "Base seed (overrides config)")
        ->each([&](const std::string&) { swp_seed_set = true; });
    swp->add_option("--out", swp_out, "Output directory");
    swp->add_option("--method", swp_methods, "Methods to run (overrides config)");
    swp->add_option("--dataset", swp_dataset, "Dataset path (overrides config)");

    // --- eval -------------------------------------------------------------
    auto* ev = app.add_subcommand("eval", "Score predicted labels");
    std::string ev_pred, ev_truth, ev_dataset;
    int ev_L = 0;
    ev->add_option("--pred", ev_pred, "Predicted label CSV")->required();
    ev->add_option("--truth", ev_truth, "True label CSV (or GML dataset truth)");
    ev->add_option("--dataset", ev_dataset, "Dataset for modularity (edge list or GML)");
    ev->add_option("-L,--L-max", ev_L, "Label alphabet size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            auto fg = absbm::sample_four_group(gen_zout, gen_seed);
            auto params = absbm::detail::attribute_params(4, gen_mu_gap, gen_sigma);
            auto attrs = absbm::sample_attributes(fg.truth, params, absbm::hash_combine(gen_seed, 2));
            std::ofstream edges(gen_out + ".edges"), labels(gen_out + "_labels.csv"),
                attrf(gen_out + "_attrs.csv");
            if (!edges || !labels || !attrf) throw absbm::io_error("cannot write outputs: " + gen_out);
            absbm::write_edge_list(edges, fg.network);
            absbm::write_label_csv(labels, fg.truth);
            absbm::write_attribute_csv(attrf, attrs);
            std::cout << "wrote " << gen_out << ".edges (" << fg.network.n_edges() << " edges), "
                      << gen_out << "_labels.csv, " << gen_out << "_attrs.csv\n";
        } else if (*det) {
            if (det_schedule == "random") det_cfg.schedule = absbm::Schedule::RandomPermutation;
            else if (det_schedule != "fixed") throw absbm::validation_error("unknown schedule");
            auto ds = load_dataset(det_dataset);
            auto& net = ds.network;
            int L = det_L > 0 ? det_L : (ds.truth ? ds.truth->n_labels() : 0);
            if (L <= 0) throw absbm::validation_error("no truth labels in dataset; pass -L");
            if (!det_attrs.empty()) {
                std::ifstream af(det_attrs);
                if (!af) throw absbm::io_error("cannot open attributes: " + det_attrs);
                net.set_attributes(absbm::parse_attribute_csv(af, net.n_vertices()));
            } else if (det_gen_sigma > 0.0) {
                if (!ds.truth)
                    throw absbm::validation_error("--gen-attr-sigma needs truth labels in the dataset");
                auto params = absbm::detail::attribute_params(L, det_mu_gap, det_gen_sigma);
                net.set_attributes(
                    absbm::sample_attributes(*ds.truth, params, absbm::hash_combine(det_seed, 2)));
            } else {
                throw absbm::validation_error("pass --attributes or --gen-attr-sigma");
            }

            absbm::GroundTruth predicted;
            std::vector<double> beliefs;
            bool converged = true;
            int iterations = 0;
            auto method = absbm::parse_method(det_method);
            if (method == absbm::Method::KMeans) {
                predicted = absbm::detect_kmeans_only(net.attributes(), L, det_seed);
            } else {
                auto r = method == absbm::Method::BpEm
                             ? absbm::detect(net, L, det_cfg, det_seed)
                             : absbm::detect_naive_mf(net, L, det_cfg, det_seed);
                predicted = std::move(r.labels);
                beliefs = std::move(r.beliefs);
                converged = r.converged;
                iterations = r.iterations;
            }

            std::cout << "method=" << det_method << " iterations=" << iterations
                      << " converged=" << (converged ? "yes" : "no")
                      << " modularity=" << absbm::modularity(predicted, net);
            if (ds.truth)
                std::cout << " accuracy=" << absbm::accuracy(predicted, *ds.truth, L).accuracy;
            std::cout << '\n';

            if (!det_out.empty()) {
                std::ofstream lf(det_out + "_labels.csv");
                if (!lf) throw absbm::io_error("cannot write labels: " + det_out);
                absbm::write_label_csv(lf, predicted);
                if (!beliefs.empty()) {
                    std::ofstream bf(det_out + "_beliefs.csv");
                    write_beliefs_csv(bf, beliefs, static_cast<std::size_t>(L));
                }
            }
        } else if (*swp) {
            absbm::ExperimentConfig cfg;
            if (!swp_config.empty()) {
                std::ifstream cf(swp_config);
                if (!cf) throw absbm::io_error("cannot open config: " + swp_config);
                cfg = absbm::parse_experiment_config(cf);
            }
            if (!swp_kind.empty()) cfg.kind = absbm::parse_experiment_kind(swp_kind);
            if (swp_trials > 0) cfg.trials = swp_trials;
            if (swp_seed_set) cfg.base_seed = swp_seed;
            if (!swp_dataset.empty()) cfg.dataset_path = swp_dataset;
            if (!swp_methods.empty()) {
                cfg.methods.clear();
                for (const auto& m : swp_methods) cfg.methods.push_back(absbm::parse_method(m));
            }
            std::filesystem::create_directories(swp_out);
            auto res = absbm::run_experiment(cfg);
            absbm::emit_report_files(res, swp_out);
            std::cout << "wrote " << swp_out << "/summary.csv and " << swp_out << "/trials.csv ("
                      << res.trials.size() << " trials)\n";
        } else if (*ev) {
            absbm::GroundTruth truth;
            bool have_truth = false;
            std::optional<absbm::AttributedNetwork> net;
            if (!ev_dataset.empty()) {
                auto ds = load_dataset(ev_dataset);
                net = std::move(ds.network);
                if (ds.truth && ev_truth.empty()) {
                    truth = std::move(*ds.truth);
                    have_truth = true;
                }
            }
            int n = net ? net->n_vertices() : 0;
            if (n == 0) {
                // infer the vertex count from the prediction file
                std::ifstream pf(ev_pred);
                std::string line;
                int count = -1;  // header
                while (std::getline(pf, line))
                    if (!line.empty()) ++count;
                n = count;
            }
            std::ifstream pf(ev_pred);
            if (!pf) throw absbm::io_error("cannot open predictions: " + ev_pred);
            auto predicted = absbm::parse_label_csv(pf, n);
            if (!ev_truth.empty()) {
                std::ifstream tf(ev_truth);
                if (!tf) throw absbm::io_error("cannot open truth: " + ev_truth);
                truth = absbm::parse_label_csv(tf, n);
                have_truth = true;
            }
            if (have_truth) {
                int L = ev_L > 0 ? ev_L : std::max(predicted.n_labels(), truth.n_labels());
                std::cout << "accuracy=" << absbm::accuracy(predicted, truth, L).accuracy << '\n';
            }
            if (net) std::cout << "modularity=" << absbm::modularity(predicted, *net) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
