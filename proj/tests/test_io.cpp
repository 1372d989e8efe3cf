#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "anmmm/errors.hpp"
#include "anmmm/io.hpp"
#include "doctest.h"

using anmmm::Direction;
using anmmm::Matrix;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "anmmm_io_test_" + std::to_string(counter++) + ".txt";
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_pairs parses plain tables") {
    TempFile f("1 2\n3 4\n");
    const auto pf = anmmm::load_pairs(f.path, 0, 1);
    CHECK(pf.rows.rows() == 2);
    CHECK(pf.rows(0, 0) == 1.0);
    CHECK(pf.rows(1, 1) == 4.0);
    CHECK(pf.selected.col(0)(1) == 3.0);
}

TEST_CASE("load_pairs handles comments, commas and tabs") {
    TempFile f("# x y\n1,2\n3\t4\n\n  # trailing comment\n5 6\n");
    const auto pf = anmmm::load_pairs(f.path, 1, 0);
    CHECK(pf.rows.rows() == 3);
    CHECK(pf.rows(1, 0) == 3.0);
    // column selection honored
    CHECK(pf.selected(0, 0) == 2.0);
    CHECK(pf.selected(0, 1) == 1.0);
}

TEST_CASE("load_pairs error reporting") {
    TempFile bad_cell("1 2\n3 oops\n");
    try {
        anmmm::load_pairs(bad_cell.path, 0, 1);
        FAIL("expected a parse error");
    } catch (const anmmm::ParseError& e) {
        CHECK(e.line() == 2);
    }

    TempFile ragged("1 2\n3 4 5\n");
    try {
        anmmm::load_pairs(ragged.path, 0, 1);
        FAIL("expected a parse error");
    } catch (const anmmm::ParseError& e) {
        CHECK(e.line() == 2);
    }

    TempFile two_cols("1 2\n3 4\n");
    CHECK_THROWS_AS(anmmm::load_pairs(two_cols.path, 0, 2), anmmm::ParseError);
    CHECK_THROWS_AS(anmmm::load_pairs("no_such_file_here.csv", 0, 1), anmmm::ParseError);

    TempFile empty("# only a comment\n");
    CHECK_THROWS_AS(anmmm::load_pairs(empty.path, 0, 1), anmmm::ParseError);
}

TEST_CASE("load_pairs reload round-trip") {
    TempFile f("0.25 -3.5\n1e-3 42\n7 0.125\n");
    const auto pf = anmmm::load_pairs(f.path, 0, 1);

    std::ostringstream rewritten;
    for (Eigen::Index i = 0; i < pf.rows.rows(); ++i) {
        rewritten << pf.rows(i, 0) << " " << pf.rows(i, 1) << "\n";
    }
    TempFile g(rewritten.str());
    const auto pf2 = anmmm::load_pairs(g.path, 0, 1);
    CHECK((pf.rows - pf2.rows).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("subsample basic contracts") {
    Matrix pairs(5, 2);
    for (int i = 0; i < 5; ++i) {
        pairs(i, 0) = i;
        pairs(i, 1) = 10 + i;
    }

    // k = N gives a permutation
    const Matrix all = anmmm::subsample(pairs, 5, 3);
    std::set<double> seen;
    for (int i = 0; i < 5; ++i) {
        seen.insert(all(i, 0));
    }
    CHECK(seen.size() == 5);

    const Matrix one = anmmm::subsample(pairs, 1, 3);
    CHECK(one.rows() == 1);
    CHECK(one(0, 1) == 10 + one(0, 0));

    CHECK_THROWS_AS(anmmm::subsample(pairs, 6, 0), std::invalid_argument);
    CHECK_THROWS_AS(anmmm::subsample(pairs, 0, 0), std::invalid_argument);

    // deterministic given seed
    const Matrix a = anmmm::subsample(pairs, 3, 9);
    const Matrix b = anmmm::subsample(pairs, 3, 9);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("subsample draws distinct rows with pigeonhole overlap") {
    Matrix pairs(100, 2);
    for (int i = 0; i < 100; ++i) {
        pairs(i, 0) = i;
        pairs(i, 1) = -i;
    }
    const Matrix a = anmmm::subsample(pairs, 90, 1);
    const Matrix b = anmmm::subsample(pairs, 90, 2);
    std::set<double> ia;
    std::set<double> ib;
    for (int i = 0; i < 90; ++i) {
        ia.insert(a(i, 0));
        ib.insert(b(i, 0));
    }
    CHECK(ia.size() == 90);
    CHECK(ib.size() == 90);
    std::vector<double> overlap;
    std::set_intersection(ia.begin(), ia.end(), ib.begin(), ib.end(),
                          std::back_inserter(overlap));
    CHECK(overlap.size() >= 80);
}

TEST_CASE("accuracy scoring") {
    using anmmm::TrialRecord;
    auto rec = [](Direction verdict, Direction truth) {
        TrialRecord r;
        r.verdict = verdict;
        r.truth = truth;
        return r;
    };

    CHECK(anmmm::accuracy({rec(Direction::XtoY, Direction::XtoY),
                           rec(Direction::YtoX, Direction::YtoX)}) == 1.0);
    CHECK(anmmm::accuracy({rec(Direction::XtoY, Direction::XtoY),
                           rec(Direction::XtoY, Direction::YtoX)}) == 0.5);
    // abstention counts as incorrect
    CHECK(anmmm::accuracy({rec(Direction::XtoY, Direction::XtoY),
                           rec(Direction::XtoY, Direction::XtoY),
                           rec(Direction::NoDecision, Direction::XtoY)}) ==
          doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(anmmm::accuracy({}), std::invalid_argument);
}

TEST_CASE("trial records round-trip through the key-value log") {
    std::vector<anmmm::TrialRecord> records(2);
    records[0].seed = 42;
    records[0].dataset_id = "f3_n100_s0.05_t0";
    records[0].verdict = Direction::XtoY;
    records[0].truth = Direction::XtoY;
    records[0].metric = 0.75;
    records[0].wall_seconds = 1.5;
    records[1].seed = 43;
    records[1].dataset_id = "f3_n100_s0.05_t1";
    records[1].verdict = Direction::NoDecision;
    records[1].truth = Direction::YtoX;
    records[1].metric = -0.125;
    records[1].wall_seconds = 0.25;

    std::stringstream buf;
    anmmm::write_records(buf, records);
    const auto back = anmmm::read_records(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0].seed == 42);
    CHECK(back[0].dataset_id == records[0].dataset_id);
    CHECK(back[0].verdict == Direction::XtoY);
    CHECK(back[0].metric == doctest::Approx(0.75));
    CHECK(back[1].verdict == Direction::NoDecision);
    CHECK(back[1].truth == Direction::YtoX);
    CHECK(back[1].metric == doctest::Approx(-0.125));
    CHECK(back[1].wall_seconds == doctest::Approx(0.25));
}
