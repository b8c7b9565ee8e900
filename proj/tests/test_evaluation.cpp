// Copyright 2026 The bijmatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "oracles.hpp"

#include "bijmatch/error.hpp"
#include "bijmatch/evaluation.hpp"
#include "bijmatch/keyvalue.hpp"

#include <doctest.h>

#include <cmath>

using namespace bijmatch;

namespace {

BinaryMask rect(Extent e, int y0, int x0, int h, int w) {
    BinaryMask m(e);
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
            m.set(y, x, true);
    return m;
}

BinaryMask random_blob(Rng& rng, Extent e) {
    BinaryMask m(e);
    const int n = rng.uniform_int(1, 4);
    for (int i = 0; i < n; ++i) {
        const int h = rng.uniform_int(1, e.height / 2);
        const int w = rng.uniform_int(1, e.width / 2);
        const int y0 = rng.uniform_int(0, e.height - h);
        const int x0 = rng.uniform_int(0, e.width - w);
        for (int y = y0; y < y0 + h; ++y)
            for (int x = x0; x < x0 + w; ++x)
                m.set(y, x, true);
    }
    return m;
}

LabelMask labels_of(const BinaryMask& m) {
    LabelMask l(m.extent);
    for (std::size_t i = 0; i < m.bits.size(); ++i)
        l.labels[i] = m.bits[i];
    return l;
}

} // namespace

TEST_CASE("region accuracy J") {
    const Extent e{1, 8};
    const BinaryMask gt = rect(e, 0, 0, 1, 8);
    CHECK(region_accuracy_j(gt, gt) == 1.0);
    CHECK(region_accuracy_j(rect(e, 0, 0, 1, 4), gt) == 0.5); // half of an 8-pixel strip
    CHECK(region_accuracy_j(rect(e, 0, 0, 1, 3), rect(e, 0, 5, 1, 3)) == 0.0);
    CHECK(region_accuracy_j(BinaryMask(e), BinaryMask(e)) == 1.0);
    CHECK_THROWS_AS(region_accuracy_j(gt, BinaryMask({2, 4})), InvalidArgument);
}

TEST_CASE("mask boundary uses 4-neighbours and the image border") {
    const BinaryMask m = rect({5, 5}, 1, 1, 3, 3);
    const BinaryMask b = mask_boundary(m);
    CHECK(b.count() == 8);
    CHECK_FALSE(b.at(2, 2));
    CHECK(mask_boundary(rect({3, 3}, 0, 0, 3, 3)).count() == 8);
}

TEST_CASE("contour accuracy F") {
    const Extent e{100, 100};
    const BinaryMask sq = rect(e, 30, 30, 10, 10);
    CHECK(contour_accuracy_f(sq, sq) == 1.0);
    CHECK(contour_accuracy_f(BinaryMask(e), sq) == 0.0);
    CHECK(contour_accuracy_f(sq, BinaryMask(e)) == 0.0);
    CHECK(contour_accuracy_f(BinaryMask(e), BinaryMask(e)) == 1.0);
    SUBCASE("one-pixel shift is within tolerance") {
        const BinaryMask shifted = rect(e, 31, 30, 10, 10);
        CHECK(contour_accuracy_f(shifted, sq) == 1.0);
        CHECK(oracle::boundary_f(shifted, sq) == 1.0);
        // Diagonal 141.4 * 0.008 rounds to 1; a shift of 3 is not tolerated.
        CHECK(contour_accuracy_f(rect(e, 33, 30, 10, 10), sq) < 1.0);
    }
    SUBCASE("agrees with the distance oracle and is symmetric") {
        Rng rng(51);
        for (int i = 0; i < 25; ++i) {
            const Extent ext{rng.uniform_int(20, 90), rng.uniform_int(20, 90)};
            const double tol = i % 2 ? 0.008 : 0.03;
            const BinaryMask a = random_blob(rng, ext);
            const BinaryMask b = random_blob(rng, ext);
            CHECK(contour_accuracy_f(a, b, tol) == doctest::Approx(oracle::boundary_f(a, b, tol)).epsilon(1e-12));
            CHECK(contour_accuracy_f(a, b, tol) == contour_accuracy_f(b, a, tol));
            CHECK(region_accuracy_j(a, b) == region_accuracy_j(b, a));
        }
    }
    SUBCASE("integer upscaling leaves J unchanged and F nearly so") {
        // 177x177 gives a tolerance radius of 2 px, so the radius scales with
        // the factor. Below 1 px the radius rounds to 0 and F is not stable.
        Rng rng(52);
        const int n = 177;
        for (int factor : {2, 3}) {
            for (int i = 0; i < 6; ++i) {
                const BinaryMask a = random_blob(rng, {n, n});
                const BinaryMask b = random_blob(rng, {n, n});
                BinaryMask ua({n * factor, n * factor}), ub({n * factor, n * factor});
                for (int y = 0; y < n * factor; ++y) {
                    for (int x = 0; x < n * factor; ++x) {
                        ua.set(y, x, a.at(y / factor, x / factor));
                        ub.set(y, x, b.at(y / factor, x / factor));
                    }
                }
                CHECK(region_accuracy_j(ua, ub) == doctest::Approx(region_accuracy_j(a, b)).epsilon(1e-12));
                CHECK(std::abs(contour_accuracy_f(ua, ub) - contour_accuracy_f(a, b)) <= 0.05);
            }
        }
    }
}

TEST_CASE("evaluate_sequence") {
    const Extent e{100, 100};
    SUBCASE("perfect predictions") {
        const std::vector<LabelMask> g{labels_of(rect(e, 10, 10, 20, 20)), labels_of(rect(e, 12, 10, 20, 20))};
        const EvalReport r = evaluate_sequence(g, g);
        CHECK(r.j_mean == 1.0);
        CHECK(r.f_mean == 1.0);
        CHECK(r.g_mean == 1.0);
    }
    SUBCASE("all background predictions") {
        const std::vector<LabelMask> g{labels_of(rect(e, 10, 10, 20, 20)), labels_of(rect(e, 12, 10, 20, 20))};
        const std::vector<LabelMask> p{LabelMask(e), LabelMask(e)};
        const EvalReport r = evaluate_sequence(p, g);
        CHECK(r.j_mean == 0.0);
        CHECK(r.f_mean == 0.0);
    }
    SUBCASE("hand-built two-frame case scores frame 1 only") {
        // Frame 1: a 2x10 strip predicted by its upper row. J = 0.5; every
        // boundary pixel is within one pixel of the other boundary, F = 1.
        const BinaryMask gt1 = rect(e, 20, 20, 2, 10);
        const BinaryMask pred1 = rect(e, 20, 20, 1, 10);
        REQUIRE(region_accuracy_j(pred1, gt1) == 0.5);
        REQUIRE(oracle::boundary_f(pred1, gt1) == 1.0);
        const std::vector<LabelMask> g{labels_of(gt1), labels_of(gt1)};
        const std::vector<LabelMask> p{labels_of(gt1), labels_of(pred1)};
        const EvalReport r = evaluate_sequence(p, g);
        CHECK(r.j_mean == 0.5);
        CHECK(r.f_mean == 1.0);
        CHECK(r.g_mean == 0.75);
        REQUIRE(r.objects.size() == 1);
        CHECK(r.objects[0].frames == std::vector<int>{1});
    }
    SUBCASE("means are over objects of per-object means") {
        LabelMask g(e), p(e);
        for (int y = 0; y < 10; ++y) {
            for (int x = 0; x < 10; ++x) {
                g.labels[static_cast<std::size_t>(y) * 100 + x] = 1;
                g.labels[static_cast<std::size_t>(y + 50) * 100 + x + 50] = 2;
                p.labels[static_cast<std::size_t>(y) * 100 + x] = 1;
            }
        }
        const EvalReport r = evaluate_sequence({g, p}, {g, g});
        CHECK(r.object_count == 2);
        CHECK(r.objects[0].j_mean == 1.0);
        CHECK(r.objects[1].j_mean == 0.0);
        CHECK(r.j_mean == 0.5);
        CHECK(r.g_mean == (r.j_mean + r.f_mean) / 2);
    }
    SUBCASE("single frame is scored") {
        const std::vector<LabelMask> g{labels_of(rect(e, 10, 10, 20, 20))};
        const EvalReport r = evaluate_sequence(g, g);
        CHECK(r.objects[0].frames == std::vector<int>{0});
        CHECK(r.j_mean == 1.0);
    }
    SUBCASE("mismatches") {
        const std::vector<LabelMask> one{LabelMask(e)};
        const std::vector<LabelMask> two{LabelMask(e), LabelMask(e)};
        CHECK_THROWS_AS(evaluate_sequence(one, two), InvalidArgument);
        CHECK_THROWS_AS(evaluate_sequence({LabelMask({4, 4})}, one), InvalidArgument);
    }
}

TEST_CASE("report text is key=value with per-frame rows") {
    const Extent e{100, 100};
    const std::vector<LabelMask> g{labels_of(rect(e, 10, 10, 20, 20)), labels_of(rect(e, 12, 10, 20, 20)),
                                   labels_of(rect(e, 14, 10, 20, 20))};
    const EvalReport r = evaluate_sequence(g, g);
    const KeyValueDoc doc = KeyValueDoc::parse(format_report(r));
    CHECK(doc.require_int("frames") == 3);
    CHECK(doc.require_int("objects") == 1);
    CHECK(doc.require_double("G_mean") == 1.0);
    CHECK(doc.require("object1.frame.2") == "1.000000 1.000000");
    CHECK_FALSE(doc.has("object1.frame.0"));
}
