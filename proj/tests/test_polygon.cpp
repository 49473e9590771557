#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "semitoric/polygon.hpp"

using namespace semitoric;

namespace {

RationalPolygon square() {
    RationalPolygon p;
    p.vertices = {{Rational(0), Rational(0)},
                  {Rational(1), Rational(0)},
                  {Rational(1), Rational(1)},
                  {Rational(0), Rational(1)}};
    return p;
}

RationalPolygon triangle(std::int64_t lam) {
    RationalPolygon p;
    p.vertices = {{Rational(0), Rational(0)},
                  {Rational(lam), Rational(0)},
                  {Rational(0), Rational(lam)}};
    return p;
}

// Bounded complexity-1 semitoric polygon: the cut-top corner at (1,2) is a
// fake corner (straightens under the unit monodromy shear), so cut flips
// stay inside the convex class.
WeightedPolygon jc_trapezoid(const Rational& h) {
    WeightedPolygon w;
    w.polygon.vertices = {{Rational(-1), Rational(0)},
                          {Rational(2), Rational(0)},
                          {Rational(2), Rational(2)},
                          {Rational(1), Rational(2)}};
    w.cuts = {{Rational(1), +1}};
    w.heights = {h};
    w.twisting = {0};
    return w;
}

WeightedPolygon jc_wide(const Rational& h) {
    WeightedPolygon w;
    w.polygon.vertices = {{Rational(-1), Rational(0)},
                          {Rational(3), Rational(0)},
                          {Rational(3), Rational(2)},
                          {Rational(1), Rational(2)}};
    w.cuts = {{Rational(1), +1}};
    w.heights = {h};
    w.twisting = {0};
    return w;
}

WeightedPolygon weighted_square() {
    WeightedPolygon w;
    w.polygon = square();
    w.cuts = {{Rational(1, 2), +1}};
    w.heights = {Rational(1, 2)};
    w.twisting = {0};
    return w;
}

std::array<std::int64_t, 4> random_unimodular(std::mt19937_64& rng) {
    std::array<std::int64_t, 4> m{1, 0, 0, 1};
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<std::int64_t> shear(-2, 2);
    for (int step = 0; step < 4; ++step) {
        std::array<std::int64_t, 4> g{};
        switch (pick(rng)) {
            case 0: g = {1, 0, shear(rng), 1}; break;
            case 1: g = {1, shear(rng), 0, 1}; break;
            default: g = {0, -1, 1, 0}; break;
        }
        m = {g[0] * m[0] + g[1] * m[2], g[0] * m[1] + g[1] * m[3],
             g[2] * m[0] + g[3] * m[2], g[2] * m[1] + g[3] * m[3]};
    }
    return m;
}

RationalPolygon apply_matrix(const RationalPolygon& p, const std::array<std::int64_t, 4>& m) {
    RationalPolygon q = p;
    for (auto& v : q.vertices) {
        const Rational x = Rational(m[0]) * v.x + Rational(m[1]) * v.y;
        const Rational y = Rational(m[2]) * v.x + Rational(m[3]) * v.y;
        v = {x, y};
    }
    Rational twice(0);
    for (std::size_t i = 0; i < q.vertices.size(); ++i)
        twice += cross(q.vertices[i], q.vertices[(i + 1) % q.vertices.size()]);
    if (twice.sign() < 0) std::reverse(q.vertices.begin(), q.vertices.end());
    return q;
}

} // namespace

TEST_CASE("unit square is Delzant") {
    const auto res = delzant_check(square());
    CHECK(res.ok);
    for (const auto& c : res.certificates) CHECK(std::abs(c.det) == 1);
}

TEST_CASE("scaled projective-plane triangles are Delzant") {
    for (std::int64_t lam : {1, 2, 3}) CHECK(delzant_check(triangle(lam)).ok);
}

TEST_CASE("conv{(0,0),(2,0),(0,1)} fails with determinant 2 at (0,1)") {
    RationalPolygon p;
    p.vertices = {{Rational(0), Rational(0)}, {Rational(2), Rational(0)},
                  {Rational(0), Rational(1)}};
    const auto res = delzant_check(p);
    CHECK_FALSE(res.ok);
    REQUIRE(res.failures.size() == 1);
    CHECK(res.failures[0].vertex == 2);
    CHECK(std::abs(res.failures[0].det) == 2);
}

TEST_CASE("group action: k = 0 is the identity, unit square at k = 1") {
    const auto p = square();
    const auto same = polygon_group_action(p, 0);
    REQUIRE(same.vertices.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(same.vertices[i] == p.vertices[i]);

    const auto sheared = polygon_group_action(p, 1);
    const std::vector<RatPoint> want = {{Rational(0), Rational(0)},
                                        {Rational(1), Rational(1)},
                                        {Rational(1), Rational(2)},
                                        {Rational(0), Rational(1)}};
    REQUIRE(sheared.vertices.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(sheared.vertices[i] == want[i]);
}

TEST_CASE("group law: action(action(P,a),b) = action(P,a+b)") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> ab(-4, 4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = triangle(1 + trial % 3);
        const std::int64_t a = ab(rng), b = ab(rng);
        const auto lhs = polygon_group_action(polygon_group_action(p, a), b);
        const auto rhs = polygon_group_action(p, a + b);
        REQUIRE(lhs.vertices.size() == rhs.vertices.size());
        for (std::size_t i = 0; i < lhs.vertices.size(); ++i)
            CHECK(lhs.vertices[i] == rhs.vertices[i]);
    }
}

TEST_CASE("delzant_check invariant under shears, translations and unimodular maps") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<std::int64_t> tr(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
        const RationalPolygon base = trial % 2 ? square() : triangle(2);
        const bool want = delzant_check(base).ok;
        const auto m = random_unimodular(rng);
        RationalPolygon q = apply_matrix(base, m);
        q = translate(q, {Rational(tr(rng)), Rational(tr(rng))});
        CHECK(delzant_check(q).ok == want);
    }
    for (std::int64_t k = -5; k <= 5; ++k)
        CHECK(delzant_check(polygon_group_action(square(), k)).ok);
}

TEST_CASE("vertical section of the square") {
    const auto s = vertical_section(square(), Rational(1, 2));
    REQUIRE(s.has_value());
    CHECK(s->first == Rational(0));
    CHECK(s->second == Rational(1));
    CHECK_FALSE(vertical_section(square(), Rational(2)).has_value());
}

TEST_CASE("flip straightens the fake corner and preserves exact area") {
    const auto w = jc_trapezoid(Rational(1));
    CHECK(delzant_check(w).ok); // (1,2) is a fake corner, others unimodular
    const auto flipped = flip_cut(w, 0);
    CHECK(flipped.cuts[0].eps == -1);
    // the fake corner (1,2) straightens; a new one appears at (1,0)
    const std::vector<RatPoint> want = {{Rational(-1), Rational(0)},
                                        {Rational(1), Rational(0)},
                                        {Rational(2), Rational(1)},
                                        {Rational(2), Rational(3)}};
    REQUIRE(flipped.polygon.vertices.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(flipped.polygon.vertices[i] == want[i]);
    CHECK(polygon_area(flipped.polygon) == polygon_area(w.polygon));
    CHECK(flipped.heights[0] == w.heights[0]);
    CHECK(delzant_check(flipped).ok);
    // involutive
    const auto back = flip_cut(flipped, 0);
    CHECK(weighted_polygon_equiv(back, w));
}

TEST_CASE("flipping a non-semitoric cut leaves the convex class") {
    CHECK_THROWS_AS(flip_cut(weighted_square(), 0), ConvexityLoss);
}

TEST_CASE("equivalence: translation, shear, flip") {
    const auto w = jc_trapezoid(Rational(1));
    CHECK(weighted_polygon_equiv(w, w));
    CHECK(weighted_polygon_equiv(w, translate(w, {Rational(3), Rational(-2)})));
    CHECK(weighted_polygon_equiv(w, polygon_group_action(w, 2)));
    CHECK(weighted_polygon_equiv(w, flip_cut(w, 0)));
    CHECK(weighted_polygon_equiv(
        w, translate(polygon_group_action(flip_cut(w, 0), -1), {Rational(1, 2), Rational(4)})));
}

TEST_CASE("non-equivalent polygons are rejected") {
    const auto w = jc_trapezoid(Rational(1));
    CHECK_FALSE(weighted_polygon_equiv(w, jc_wide(Rational(1))));
    CHECK_FALSE(weighted_polygon_equiv(w, jc_trapezoid(Rational(1, 2))));
    WeightedPolygon moved_cut = jc_wide(Rational(1));
    moved_cut.cuts[0].lambda = Rational(2);
    CHECK_FALSE(weighted_polygon_equiv(jc_wide(Rational(1)), moved_cut));
}

TEST_CASE("equivalence is reflexive, symmetric, transitive on a generated family") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::int64_t> tr(-3, 3), sh(-2, 2);
    std::uniform_int_distribution<int> flip(0, 1);
    std::vector<WeightedPolygon> family;
    std::vector<int> cls;
    const std::vector<WeightedPolygon> bases = {
        jc_trapezoid(Rational(1)), jc_wide(Rational(1, 2)), jc_trapezoid(Rational(3, 2))};
    for (int i = 0; i < 50; ++i) {
        const int which = i % static_cast<int>(bases.size());
        WeightedPolygon w = bases[which];
        w = polygon_group_action(w, sh(rng));
        if (flip(rng)) w = flip_cut(w, 0);
        w = translate(w, {Rational(tr(rng)), Rational(tr(rng))});
        family.push_back(w);
        cls.push_back(which);
    }
    for (const auto& w : family) CHECK(weighted_polygon_equiv(w, w));
    std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
    for (int t = 0; t < 120; ++t) {
        const auto i = pick(rng), j = pick(rng);
        const bool ij = weighted_polygon_equiv(family[i], family[j]);
        CHECK(ij == weighted_polygon_equiv(family[j], family[i]));
        CHECK(ij == (cls[i] == cls[j]));
    }
    for (int t = 0; t < 40; ++t) {
        const auto i = pick(rng), j = pick(rng), k = pick(rng);
        if (weighted_polygon_equiv(family[i], family[j]) &&
            weighted_polygon_equiv(family[j], family[k]))
            CHECK(weighted_polygon_equiv(family[i], family[k]));
    }
}

TEST_CASE("heights preserved by translations and global shears") {
    const auto w = jc_trapezoid(Rational(1));
    for (std::int64_t k = -3; k <= 3; ++k) {
        const auto moved = translate(polygon_group_action(w, k), {Rational(5), Rational(k)});
        CHECK(moved.heights[0] == w.heights[0]);
        validate_weighted(moved);
    }
}

TEST_CASE("unbounded polygon: kinked strip flips to a straight one") {
    // { x >= -1, 0 <= y <= min(x+1, 2) }: vertices (1,2) then (-1,0),
    // entering along the flat top edge and leaving along the bottom.
    WeightedPolygon w;
    w.polygon.unbounded = true;
    w.polygon.vertices = {{Rational(1), Rational(2)}, {Rational(-1), Rational(0)}};
    w.polygon.ray_in = {Rational(1), Rational(0)};
    w.polygon.ray_out = {Rational(1), Rational(0)};
    w.cuts = {{Rational(1), +1}};
    w.heights = {Rational(1)};
    w.twisting = {0};
    validate_weighted(w);
    CHECK(delzant_check(w).ok);

    const auto flipped = flip_cut(w, 0);
    REQUIRE(flipped.polygon.vertices.size() == 2);
    CHECK(flipped.polygon.vertices[0] == RatPoint{Rational(-1), Rational(0)});
    CHECK(flipped.polygon.vertices[1] == RatPoint{Rational(1), Rational(0)});
    CHECK(primitive_direction(flipped.polygon.ray_in) ==
          std::make_pair(std::int64_t(1), std::int64_t(1)));
    CHECK(primitive_direction(flipped.polygon.ray_out) ==
          std::make_pair(std::int64_t(1), std::int64_t(1)));
    CHECK(delzant_check(flipped).ok);
    CHECK(weighted_polygon_equiv(w, flipped));
}
