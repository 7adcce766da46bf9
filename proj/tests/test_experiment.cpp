#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "oracles.hpp"

using namespace absbm;

namespace {

// two 4-cliques joined by one bridge, ground truth in the node values
const char* kTwoCliqueGml =
    "graph [\n"
    "  node [ id 0 value 1 ]\n"
    "  node [ id 1 value 1 ]\n"
    "  node [ id 2 value 1 ]\n"
    "  node [ id 3 value 1 ]\n"
    "  node [ id 4 value 2 ]\n"
    "  node [ id 5 value 2 ]\n"
    "  node [ id 6 value 2 ]\n"
    "  node [ id 7 value 2 ]\n"
    "  edge [ source 0 target 1 ]\n"
    "  edge [ source 0 target 2 ]\n"
    "  edge [ source 0 target 3 ]\n"
    "  edge [ source 1 target 2 ]\n"
    "  edge [ source 1 target 3 ]\n"
    "  edge [ source 2 target 3 ]\n"
    "  edge [ source 4 target 5 ]\n"
    "  edge [ source 4 target 6 ]\n"
    "  edge [ source 4 target 7 ]\n"
    "  edge [ source 5 target 6 ]\n"
    "  edge [ source 5 target 7 ]\n"
    "  edge [ source 6 target 7 ]\n"
    "  edge [ source 3 target 4 ]\n"
    "]\n";

struct TempGml {
    std::string path = "test_two_clique_tmp.gml";
    TempGml() {
        std::ofstream out(path);
        out << kTwoCliqueGml;
    }
    ~TempGml() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("trial seeds are stable under config growth") {
    auto s = trial_seed(7, 1.5, 3, Method::BpEm);
    CHECK(s == trial_seed(7, 1.5, 3, Method::BpEm));
    CHECK(s != trial_seed(7, 1.5, 3, Method::KMeans));
    CHECK(s != trial_seed(7, 1.5, 4, Method::BpEm));
    CHECK(s != trial_seed(7, 2.5, 3, Method::BpEm));
    CHECK(s != trial_seed(8, 1.5, 3, Method::BpEm));
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::FourGroupSweepZout;
    CHECK_THROWS_AS(cfg.validate(), validation_error);  // empty sweep
    cfg.z_out_values = {1.0};
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg.trials = 1;
    CHECK_NOTHROW(cfg.validate());
    cfg.kind = ExperimentKind::RealNetworkSweepSigma;
    cfg.sigma_values = {1.0};
    CHECK_THROWS_AS(cfg.validate(), validation_error);  // no dataset
}

TEST_CASE("single run on an easy real dataset scores perfectly") {
    TempGml tmp;
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::SingleRun;
    cfg.dataset_path = tmp.path;
    cfg.trials = 3;
    cfg.sigma = 0.5;
    cfg.methods = {Method::BpEm, Method::KMeans};
    cfg.base_seed = 11;
    auto res = run_experiment(cfg);
    REQUIRE(res.trials.size() == 6);
    for (const auto& t : res.trials) {
        CHECK(!t.failed);
        CHECK(t.accuracy == 1.0);
    }
    REQUIRE(res.summary.size() == 2);
    for (const auto& row : res.summary) {
        CHECK(row.mean_accuracy == 1.0);
        CHECK(row.se_accuracy == 0.0);
        CHECK(row.failures == 0);
    }
}

TEST_CASE("sweep bookkeeping") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::FourGroupSweepZout;
    cfg.z_out_values = {1.0, 3.0};
    cfg.trials = 2;
    cfg.methods = {Method::KMeans};
    cfg.base_seed = 3;
    auto res = run_experiment(cfg);
    CHECK(res.sweep_param == "z_out");
    REQUIRE(res.trials.size() == 4);
    REQUIRE(res.summary.size() == 2);

    SUBCASE("summary means match recomputation from the trial rows") {
        for (const auto& row : res.summary) {
            double mean = 0.0;
            int count = 0;
            for (const auto& t : res.trials) {
                if (t.method != row.method || t.sweep_value != row.sweep_value || t.failed) continue;
                mean += t.accuracy;
                ++count;
            }
            REQUIRE(count == row.trials - row.failures);
            mean /= count;
            CHECK(row.mean_accuracy == doctest::Approx(mean).epsilon(1e-12));
        }
    }
    SUBCASE("rerunning the same config reproduces every trial") {
        auto again = run_experiment(cfg);
        REQUIRE(again.trials.size() == res.trials.size());
        for (std::size_t i = 0; i < res.trials.size(); ++i) {
            CHECK(again.trials[i].seed == res.trials[i].seed);
            CHECK(again.trials[i].accuracy == res.trials[i].accuracy);
            CHECK(again.trials[i].modularity == res.trials[i].modularity);
        }
    }
}

TEST_CASE("report emission") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::FourGroupSweepSigma;
    cfg.sigma_values = {0.5, 2.0};
    cfg.trials = 2;
    cfg.methods = {Method::KMeans};
    cfg.base_seed = 19;
    auto res = run_experiment(cfg);

    SUBCASE("empty results rejected") {
        ExperimentResults empty;
        std::ostringstream a, b;
        CHECK_THROWS_AS(emit_report(empty, a, b), validation_error);
    }
    SUBCASE("headers, schema line and row counts") {
        std::ostringstream summary, trials;
        emit_report(res, summary, trials);
        std::istringstream sin(summary.str());
        std::string line;
        std::getline(sin, line);
        CHECK(line == "# absbm-sweep-summary v1");
        std::getline(sin, line);
        CHECK(line.rfind("method,sweep_param", 0) == 0);
        int rows = 0;
        while (std::getline(sin, line))
            if (!line.empty()) ++rows;
        CHECK(rows == static_cast<int>(res.summary.size()));

        std::istringstream tin(trials.str());
        std::getline(tin, line);
        CHECK(line == "# absbm-sweep-trials v1");
        std::getline(tin, line);
        rows = 0;
        while (std::getline(tin, line))
            if (!line.empty()) ++rows;
        CHECK(rows == static_cast<int>(res.trials.size()));
    }
    SUBCASE("output is byte-identical across reruns") {
        std::ostringstream s1, t1, s2, t2;
        emit_report(res, s1, t1);
        emit_report(run_experiment(cfg), s2, t2);
        CHECK(s1.str() == s2.str());
        CHECK(t1.str() == t2.str());
    }
}

TEST_CASE("config file parsing") {
    SUBCASE("full round trip of keys") {
        std::istringstream in(
            "# comment\n"
            "[experiment]\n"
            "kind = four-group-sweep-zout\n"
            "z_out_values = 1, 2.5, 4\n"
            "trials = 7\n"
            "seed = 99\n"
            "sigma = 1.5\n"
            "methods = bp-em, kmeans\n"
            "[solver]\n"
            "tol = 1e-5\n"
            "max_iterations = 50\n"
            "n_restarts = 3\n"
            "schedule = random\n");
        auto cfg = parse_experiment_config(in);
        CHECK(cfg.kind == ExperimentKind::FourGroupSweepZout);
        CHECK(cfg.z_out_values == std::vector<double>{1.0, 2.5, 4.0});
        CHECK(cfg.trials == 7);
        CHECK(cfg.base_seed == 99);
        CHECK(cfg.sigma == 1.5);
        REQUIRE(cfg.methods.size() == 2);
        CHECK(cfg.methods[0] == Method::BpEm);
        CHECK(cfg.methods[1] == Method::KMeans);
        CHECK(cfg.solver.tol == 1e-5);
        CHECK(cfg.solver.max_iterations == 50);
        CHECK(cfg.solver.n_restarts == 3);
        CHECK(cfg.solver.schedule == Schedule::RandomPermutation);
    }
    SUBCASE("defaults when no methods listed") {
        std::istringstream in("kind = single-run\n");
        auto cfg = parse_experiment_config(in);
        REQUIRE(cfg.methods.size() == 1);
        CHECK(cfg.methods[0] == Method::BpEm);
    }
    SUBCASE("unknown key rejected with line number") {
        std::istringstream in("[experiment]\nbogus = 1\n");
        try {
            parse_experiment_config(in);
            FAIL("expected parse error");
        } catch (const parse_error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("missing equals sign rejected") {
        std::istringstream in("[experiment]\nkind single-run\n");
        CHECK_THROWS_AS(parse_experiment_config(in), parse_error);
    }
}
