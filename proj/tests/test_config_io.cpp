#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "msfilter/config.hpp"
#include "msfilter/csv.hpp"
#include "msfilter/experiments.hpp"
#include "msfilter/trajectory.hpp"

using namespace msf;

TEST_CASE("config parsing: sections, comments, typed getters") {
    Config c = Config::parse_string(
        "experiment = fig1-linear\n"
        "# a comment\n"
        "[run]\n"
        "seed = 7\n"
        "cycles = 1000\n"
        "; another comment\n"
        "[fig1]\n"
        "dt = 0.5\n"
        "flag = true\n");
    CHECK(c.errors().empty());
    CHECK(c.get_string("experiment") == "fig1-linear");
    CHECK(c.get_long("run.seed") == 7);
    CHECK(c.get_double("fig1.dt") == doctest::Approx(0.5));
    CHECK(c.get_bool("fig1.flag", false));
    CHECK(c.get_long("run.missing", 42) == 42);
    CHECK_THROWS_AS(c.get_string("run.missing"), std::out_of_range);
    CHECK_THROWS_AS(c.get_long("experiment"), std::invalid_argument);
}

TEST_CASE("config parsing reports line numbers for malformed input") {
    Config c = Config::parse_string("a = 1\nnot a pair\n[unterminated\nb = 2\n");
    REQUIRE(c.errors().size() == 2);
    CHECK(c.errors()[0].find("line 2") != std::string::npos);
    CHECK(c.errors()[1].find("line 3") != std::string::npos);
    CHECK(c.get_long("a") == 1);
}

TEST_CASE("csv writer emits header, comments, and round-trippable doubles") {
    std::string path = "test_csv_out.csv";
    {
        CsvWriter w(path);
        w.comment("schema: test-v1");
        w.header({"a", "b"});
        w.row({1.0 / 3.0, 2.0});
    }
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# schema: test-v1");
    std::getline(in, line);
    CHECK(line == "a,b");
    std::getline(in, line);
    double a, b;
    CHECK(std::sscanf(line.c_str(), "%lf,%lf", &a, &b) == 2);
    CHECK(a == 1.0 / 3.0);  // %.17g survives the round trip
    CHECK(b == 2.0);
    std::remove(path.c_str());
}

TEST_CASE("observation generation: timing, stride, and seed control") {
    Trajectory t;
    for (int k = 0; k <= 10; ++k) {
        t.times.push_back(0.1 * k);
        t.states.push_back(VectorXd::Constant(2, static_cast<double>(k)));
    }
    MatrixXd r = 0.01 * MatrixXd::Identity(1, 1);
    ObservationSeries o1 = generate_observations(t, {0}, r, 2, 5);
    CHECK(o1.size() == 5);  // k = 2,4,6,8,10; t = 0 never observed
    CHECK(o1.times.front() == doctest::Approx(0.2));
    CHECK(o1.times.back() == doctest::Approx(1.0));
    ObservationSeries o2 = generate_observations(t, {0}, r, 2, 5);
    ObservationSeries o3 = generate_observations(t, {0}, r, 2, 6);
    CHECK((o1.values.back() - o2.values.back()).norm() == 0.0);
    CHECK((o1.values.back() - o3.values.back()).norm() > 0.0);
}

TEST_CASE("experiment catalog and config validation") {
    auto cat = list_experiments();
    CHECK(cat.size() == 9);
    bool has_fig5 = false, has_eps4 = false;
    for (const auto& e : cat) {
        if (e.id == "fig5-l96-sweep") has_fig5 = true;
        if (e.id == "eps4-conjecture") has_eps4 = true;
        CHECK_FALSE(e.description.empty());
        CHECK_FALSE(e.runtime_estimate.empty());
        // shipped defaults validate without edits
        Config def = Config::parse_string(default_config(e.id));
        for (const auto& p : validate_config(def))
            CHECK(p.rfind("warning:", 0) == 0);
    }
    CHECK(has_fig5);
    CHECK(has_eps4);
    CHECK_THROWS_AS(default_config("no-such-experiment"), std::invalid_argument);
}

TEST_CASE("cycles below burn-in is rejected naming both fields") {
    Config c = Config::parse_string(
        "experiment = table1-spekf\n[run]\ncycles = 10\nburn_in = 50\n");
    auto problems = validate_config(c);
    REQUIRE_FALSE(problems.empty());
    bool named = false;
    for (const auto& p : problems)
        if (p.find("run.cycles") != std::string::npos &&
            p.find("run.burn_in") != std::string::npos)
            named = true;
    CHECK(named);
}

TEST_CASE("unknown experiment id is rejected by validation") {
    Config c = Config::parse_string("experiment = bogus\n");
    auto problems = validate_config(c);
    REQUIRE_FALSE(problems.empty());
    CHECK(problems[0].find("bogus") != std::string::npos);
    CHECK_THROWS_AS(run_experiment(c, "unused_dir"), std::invalid_argument);
}

TEST_CASE("prior-covariance config warns about the expected regime-2 instability") {
    Config c = Config::parse_string(default_config("fig3-priorcov"));
    bool warned = false;
    for (const auto& p : validate_config(c))
        if (p.rfind("warning:", 0) == 0 && p.find("diverge") != std::string::npos)
            warned = true;
    CHECK(warned);
}
