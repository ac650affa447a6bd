#include "doctest.h"

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "voxmask/privacy.hpp"

using namespace voxmask;
using namespace testsupport;

TEST_SUITE_BEGIN("privacy");

TEST_CASE("build_trials: tiny case enumerates 4 genuine + 4 impostor") {
    const std::vector<TrialRecord> records{
        {"s1u1", "s1"}, {"s1u2", "s1"}, {"s2u1", "s2"}, {"s2u2", "s2"}};
    const auto set = build_trials(records, 2, 123);
    CHECK(set.genuine_count() == 4);
    CHECK(set.impostor_count() == 4);

    // per speaker: enrollment is the first utterance, paired with its own
    // anonymized version and the cross-utterance one
    int same_utt = 0, cross_utt = 0;
    for (const auto& t : set.trials) {
        if (!t.is_same_speaker) {
            CHECK(t.enroll_id.substr(0, 2) != t.test_id.substr(0, 2));
            continue;
        }
        CHECK(t.enroll_id.substr(0, 2) == t.test_id.substr(0, 2));
        if (t.enroll_id == t.test_id)
            ++same_utt;
        else
            ++cross_utt;
    }
    CHECK(same_utt == 2);
    CHECK(cross_utt == 2);
}

TEST_CASE("build_trials: fixed seed reproduces the list, different seed varies") {
    std::vector<TrialRecord> records;
    for (int s = 0; s < 5; ++s)
        for (int u = 0; u < 6; ++u)
            records.push_back({"s" + std::to_string(s) + "u" + std::to_string(u),
                               "s" + std::to_string(s)});
    const auto a = build_trials(records, 3, 99);
    const auto b = build_trials(records, 3, 99);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].enroll_id == b.trials[i].enroll_id);
        CHECK(a.trials[i].test_id == b.trials[i].test_id);
        CHECK(a.trials[i].is_same_speaker == b.trials[i].is_same_speaker);
    }
}

TEST_CASE("build_trials: single-speaker manifest is an error") {
    CHECK_THROWS_AS(build_trials({{"u1", "spk"}, {"u2", "spk"}}, 4, 1), std::invalid_argument);
}

TEST_CASE("score_trials: cosine conventions") {
    EmbeddingTable table;
    table.original["a"] = {1.0, 0.0};
    table.original["b"] = {1.0, 0.0};
    table.anonymized["a"] = {1.0, 0.0};
    table.anonymized["b"] = {0.0, 1.0};
    table.anonymized["c"] = {2.0, 0.0};

    TrialSet trials;
    trials.trials = {{"a", "a", true}, {"a", "b", false}, {"b", "c", true}};
    const auto scores = score_trials(trials, table);
    REQUIRE(scores.genuine_scores.size() == 2);
    REQUIRE(scores.impostor_scores.size() == 1);
    CHECK(scores.genuine_scores[0] == doctest::Approx(1.0));   // identical
    CHECK(scores.impostor_scores[0] == doctest::Approx(0.0));  // orthogonal
    CHECK(scores.genuine_scores[1] == doctest::Approx(1.0));   // v vs 2v

    trials.trials.push_back({"missing", "a", true});
    CHECK_THROWS_WITH_AS(score_trials(trials, table), doctest::Contains("missing"),
                         std::runtime_error);
}

TEST_CASE("compute_eer: separable, identical, and the worked hand case") {
    CHECK(compute_eer({{0.9, 0.9, 0.9}, {0.1, 0.1}}).eer == doctest::Approx(0.0));

    ScoreSet same;
    same.genuine_scores = {0.2, 0.5, 0.7};
    same.impostor_scores = {0.2, 0.5, 0.7};
    CHECK(compute_eer(same).eer == doctest::Approx(0.5));

    ScoreSet hand;
    hand.genuine_scores = {0.8, 0.6, 0.4};
    hand.impostor_scores = {0.7, 0.5, 0.3};
    const auto result = compute_eer(hand);
    CHECK(result.eer == 1.0 / 3.0);  // exact
    CHECK(result.threshold > 0.5);
    CHECK(result.threshold < 0.6);
}

TEST_CASE("compute_eer: matches the exhaustive oracle on random score sets") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> score(-1.0, 1.0);
    std::uniform_int_distribution<int> size(1, 400);
    for (int trial = 0; trial < 300; ++trial) {
        ScoreSet set;
        set.genuine_scores.resize(size(rng));
        set.impostor_scores.resize(size(rng));
        // impostors biased low so the crossing lands mid-range
        for (auto& s : set.genuine_scores) s = score(rng) + 0.3;
        for (auto& s : set.impostor_scores) s = score(rng) - 0.3;
        const double expected = eer_oracle(set.genuine_scores, set.impostor_scores);
        CHECK(std::abs(compute_eer(set).eer - expected) < 1e-9);
    }
}

TEST_CASE("compute_eer: invariant under strictly increasing transforms") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> score(-1.0, 1.0);
    ScoreSet base;
    base.genuine_scores.resize(120);
    base.impostor_scores.resize(150);
    for (auto& s : base.genuine_scores) s = score(rng) + 0.25;
    for (auto& s : base.impostor_scores) s = score(rng) - 0.25;
    const double eer0 = compute_eer(base).eer;

    auto transformed = [&](auto&& f) {
        ScoreSet t = base;
        for (auto& s : t.genuine_scores) s = f(s);
        for (auto& s : t.impostor_scores) s = f(s);
        return compute_eer(t).eer;
    };
    CHECK(transformed([](double s) { return 3.0 * s + 7.0; }) == doctest::Approx(eer0).epsilon(1e-12));
    CHECK(transformed([](double s) { return std::exp(s); }) == doctest::Approx(eer0).epsilon(1e-12));
    CHECK(transformed([](double s) { return std::atan(s); }) == doctest::Approx(eer0).epsilon(1e-12));
}

TEST_CASE("compute_eer: swapping partitions maps e to 1 - e") {
    std::mt19937 rng(47);
    std::normal_distribution<double> gen(0.6, 0.3), imp(0.0, 0.3);
    ScoreSet set;
    set.genuine_scores.resize(200);
    set.impostor_scores.resize(200);
    for (auto& s : set.genuine_scores) s = gen(rng);
    for (auto& s : set.impostor_scores) s = imp(rng);

    ScoreSet swapped;
    swapped.genuine_scores = set.impostor_scores;
    swapped.impostor_scores = set.genuine_scores;
    const double e = compute_eer(set).eer;
    const double oracle_swapped = eer_oracle(swapped.genuine_scores, swapped.impostor_scores);
    CHECK(compute_eer(swapped).eer == doctest::Approx(oracle_swapped).epsilon(1e-12));
    CHECK(compute_eer(swapped).eer == doctest::Approx(1.0 - e).epsilon(0.02));
}

TEST_CASE("compute_eer: empty partitions rejected") {
    CHECK_THROWS_AS(compute_eer({{}, {0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(compute_eer({{0.1}, {}}), std::invalid_argument);
}

TEST_CASE("mfcc_mean_embedding: deterministic and amplitude-insensitive") {
    const auto clip = make_vowel(150.0, {{650.0, 90.0}, {1100.0, 110.0}}, 1.0);
    const auto e1 = mfcc_mean_embedding(clip);
    const auto e2 = mfcc_mean_embedding(clip);
    CHECK(e1.vector == e2.vector);
    CHECK(e1.vector.size() == 20);

    AudioClip quiet = clip;
    for (auto& s : quiet.samples) s *= 0.5;
    const auto eq = mfcc_mean_embedding(quiet);
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < e1.vector.size(); ++i) {
        dot += e1.vector[i] * eq.vector[i];
        n1 += e1.vector[i] * e1.vector[i];
        n2 += eq.vector[i] * eq.vector[i];
    }
    CHECK(dot / std::sqrt(n1 * n2) >= 0.99);
}

TEST_CASE("mfcc_mean_embedding: same-speaker cosine beats cross-speaker") {
    const auto spk_a1 = make_vowel(120.0, {{700.0, 90.0}, {1150.0, 100.0}}, 1.0);
    const auto spk_a2 = make_vowel(124.0, {{690.0, 95.0}, {1180.0, 105.0}}, 1.0);
    const auto spk_b1 = make_vowel(210.0, {{380.0, 70.0}, {2100.0, 150.0}}, 1.0);

    const auto a1 = mfcc_mean_embedding(spk_a1).vector;
    const auto a2 = mfcc_mean_embedding(spk_a2).vector;
    const auto b1 = mfcc_mean_embedding(spk_b1).vector;

    auto cosine = [](const std::vector<double>& x, const std::vector<double>& y) {
        double dot = 0.0, nx = 0.0, ny = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            dot += x[i] * y[i];
            nx += x[i] * x[i];
            ny += y[i] * y[i];
        }
        return dot / std::sqrt(nx * ny);
    };
    CHECK(cosine(a1, a2) > cosine(a1, b1));
}

TEST_CASE("mfcc_mean_embedding: too-short clip rejected") {
    CHECK_THROWS_AS(mfcc_mean_embedding(make_sine(200.0, 0.3)), std::invalid_argument);
}

TEST_CASE("embedding table csv and raw float32 round trips") {
    TempDir tmp;
    std::map<std::string, std::vector<double>> rows{
        {"u1", {0.25, -1.5, 3.0}},
        {"u2", {1.0, 2.0, -0.125}},
    };
    write_embedding_csv(rows, tmp.file("emb.csv"));
    const auto csv_back = load_embedding_rows(tmp.file("emb.csv"));
    REQUIRE(csv_back.size() == 2);
    for (const auto& [id, vec] : rows) {
        REQUIRE(csv_back.count(id) == 1);
        for (std::size_t i = 0; i < vec.size(); ++i)
            CHECK(csv_back.at(id)[i] == doctest::Approx(vec[i]));
    }

    // raw float32 + sidecar
    {
        std::ofstream data(tmp.file("emb.f32"), std::ios::binary);
        for (const char* id : {"u1", "u2"})
            for (double v : rows[id]) {
                const float f = static_cast<float>(v);
                data.write(reinterpret_cast<const char*>(&f), sizeof(f));
            }
        std::ofstream idx(tmp.file("emb.f32.idx"));
        idx << 3 << "\nu1\nu2\n";
    }
    const auto raw_back = load_embedding_rows(tmp.file("emb.f32"));
    REQUIRE(raw_back.size() == 2);
    CHECK(raw_back.at("u1")[1] == doctest::Approx(-1.5));
    CHECK(raw_back.at("u2")[2] == doctest::Approx(-0.125));
}

TEST_CASE("score csv import partitions by label") {
    TempDir tmp;
    std::ofstream(tmp.file("scores.csv"))
        << "enroll_id,test_id,label,score\n"
        << "e1,t1,genuine,0.9\ne1,t2,impostor,0.2\ne2,t3,target,0.8\ne2,t4,nontarget,0.1\n";
    const auto scores = load_score_csv(tmp.file("scores.csv"));
    CHECK(scores.genuine_scores.size() == 2);
    CHECK(scores.impostor_scores.size() == 2);

    std::ofstream(tmp.file("bad.csv")) << "e1,t1,maybe,0.9\n";
    CHECK_THROWS_WITH_AS(load_score_csv(tmp.file("bad.csv")), doctest::Contains("maybe"),
                         std::runtime_error);
}

TEST_SUITE_END();
