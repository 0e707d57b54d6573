#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>

#include "hsvm/data.hpp"

using namespace hsvm;

TEST_CASE("gen_gaussian shape, manifold validity, determinism") {
    Dataset ds = gen_gaussian(2, 0.4, 50, 2, 7);
    CHECK(ds.size() == 100);
    CHECK(ds.d == 2);
    for (const auto& p : ds.points)
        CHECK(std::abs(minkowski(p.coords, p.coords) - 1.0) <= 1e-9);

    Dataset ds2 = gen_gaussian(2, 0.4, 50, 2, 7);
    for (int i = 0; i < ds.size(); ++i) {
        CHECK(ds.labels[i] == ds2.labels[i]);
        CHECK((ds.points[i].coords - ds2.points[i].coords).norm() == 0.0);
    }
}

TEST_CASE("gen_gaussian label histogram and per-class substreams") {
    Dataset ds = gen_gaussian(5, 1.0, 60, 2, 3);
    std::map<int, int> hist;
    for (int l : ds.labels) hist[l]++;
    for (int k = 0; k < 5; ++k) CHECK(hist[k] == 60);

    // class k's stream must not depend on how many classes follow it
    Dataset two = gen_gaussian(2, 1.0, 60, 2, 3);
    for (int i = 0; i < 120; ++i)
        CHECK((ds.points[i].coords - two.points[i].coords).norm() == 0.0);
}

TEST_CASE("gen_gaussian scale shrinks within-class spread") {
    Dataset tight = gen_gaussian(2, 1e-4, 30, 2, 9);
    // with s -> 0 all samples of a class collapse to exp0(center)
    for (int i = 1; i < 30; ++i)
        CHECK((tight.points[i].coords - tight.points[0].coords).norm() < 1e-2);
}

TEST_CASE("csv round trip and validation") {
    const char* path = "test_data_roundtrip.csv";
    Dataset ds = gen_gaussian(3, 0.7, 10, 2, 21);
    save_csv(ds, path);
    Dataset back = load_csv(path);
    REQUIRE(back.size() == ds.size());
    CHECK(back.d == ds.d);
    for (int i = 0; i < ds.size(); ++i) {
        CHECK(back.labels[i] == ds.labels[i]);
        CHECK((back.points[i].coords - ds.points[i].coords).norm() <= 1e-12);
    }
    std::remove(path);
}

TEST_CASE("load_csv renormalize corrects the time coordinate") {
    const char* path = "test_data_renorm.csv";
    {
        std::ofstream f(path);
        f << "label,x0,x1,x2\n";
        f << "0,1.9999999,1.7320508,0.0\n";
    }
    Dataset ds = load_csv(path, true);
    CHECK(ds.points[0].coords[0] == doctest::Approx(2.0).epsilon(1e-6));
    std::remove(path);
}

TEST_CASE("load_csv errors") {
    const char* path = "test_data_bad.csv";
    {
        std::ofstream f(path);
    }
    CHECK_THROWS(load_csv(path));  // empty file
    {
        std::ofstream f(path);
        f << "1,abc,0,0\n";
    }
    CHECK_THROWS(load_csv(path));  // non-numeric
    {
        std::ofstream f(path);
        f << "1,5.0,0.0,0.0\n";
    }
    CHECK_THROWS(load_csv(path));  // manifold violation without renormalize
    std::remove(path);
}

TEST_CASE("binary views") {
    Dataset ds = gen_gaussian(3, 0.7, 10, 2, 4);
    std::vector<int> all(ds.size());
    for (int i = 0; i < ds.size(); ++i) all[i] = i;

    BinaryView ovr = ovr_view(ds, 1, all);
    CHECK(ovr.size() == 30);
    int pos = 0;
    for (int i = 0; i < ovr.size(); ++i) {
        CHECK(std::abs(ovr.y[i]) == 1);
        if (ovr.y[i] == 1) {
            CHECK(ds.labels[ovr.indices[i]] == 1);
            ++pos;
        }
    }
    CHECK(pos == 10);
    CHECK(ovr.has_both_signs());

    BinaryView ovo = ovo_view(ds, 2, 0, all);
    CHECK(ovo.size() == 20);
    for (int i = 0; i < ovo.size(); ++i) {
        int lbl = ds.labels[ovo.indices[i]];
        CHECK((lbl == 0 || lbl == 2));
        CHECK(ovo.y[i] == (lbl == 2 ? 1 : -1));
    }
}

TEST_CASE("stratified kfold balance and determinism") {
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) labels.push_back(0);
    for (int i = 0; i < 50; ++i) labels.push_back(1);

    FoldPlan plan = stratified_kfold(labels, 5, 42);
    for (int f = 0; f < 5; ++f) {
        auto test = plan.test_indices(f);
        int zeros = 0, ones = 0;
        for (int idx : test) (labels[idx] == 0 ? zeros : ones)++;
        CHECK(zeros == 20);
        CHECK(ones == 10);
        // train/test partition the index set
        auto train = plan.train_indices(f);
        CHECK(static_cast<int>(train.size() + test.size()) == 150);
    }

    FoldPlan plan2 = stratified_kfold(labels, 5, 42);
    CHECK(plan.assignments == plan2.assignments);
    FoldPlan plan3 = stratified_kfold(labels, 5, 43);
    CHECK(plan.assignments != plan3.assignments);
}

TEST_CASE("stratified kfold remainder rule") {
    std::vector<int> labels(7, 0);
    FoldPlan plan = stratified_kfold(labels, 5, 1);
    std::vector<int> sizes(5, 0);
    for (int a : plan.assignments) sizes[a]++;
    // remainder samples go to the lowest-index folds first: {2,2,1,1,1}
    CHECK(sizes == std::vector<int>{2, 2, 1, 1, 1});
    CHECK_THROWS(stratified_kfold(labels, 1, 1));
}
