#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <json.hpp>

#include "hef/components.hpp"
#include "hef/error.hpp"
#include "hef/filters.hpp"
#include "hef/reports.hpp"
#include "hef/skeleton.hpp"
#include "hef/timeutil.hpp"
#include "hef/tracking.hpp"

using namespace hef;

namespace {

LabelMap blank_map(int w, int h) {
    LabelMap map(w, h);
    std::fill(map.labels.begin(), map.labels.end(),
              static_cast<std::uint8_t>(kClassBackground));
    return map;
}

void paint(LabelMap& map, int x0, int y0, int x1, int y1, int cls) {
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            map.at(x, y) = static_cast<std::uint8_t>(cls);
}

Component rect_comp(int x0, int y0, int w, int h, int cls = kClassFilament) {
    Component c;
    c.class_id = cls;
    for (int y = y0; y < y0 + h; ++y)
        c.runs.push_back({y, x0, x0 + w - 1});
    recompute_component_stats(c);
    return c;
}

// canonical pixel-set signature for comparing groupings regardless of order
std::set<std::set<std::pair<int, int>>> group_signature(const std::vector<Component>& groups) {
    std::set<std::set<std::pair<int, int>>> sig;
    for (const Component& g : groups) {
        std::set<std::pair<int, int>> px;
        for (auto [x, y] : component_pixels(g))
            px.insert({x, y});
        sig.insert(std::move(px));
    }
    return sig;
}

int neighbor_count(const std::set<std::pair<int, int>>& px, int x, int y) {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            if ((dx || dy) && px.count({x + dx, y + dy}))
                ++n;
    return n;
}

GroupObservation obs(const Component& c, double mean = 1.0, double disk = 1.0,
                     double len = 0.0) {
    GroupObservation o;
    o.group = c;
    o.mean_intensity = mean;
    o.disk_mean = disk;
    o.length_px = len;
    return o;
}

EventTrack flare_track(int id, const std::vector<TrackFrameStat>& frames) {
    EventTrack t;
    t.id = id;
    t.class_id = kClassFlare;
    t.frames = frames;
    t.first_seen = frames.front().timestamp;
    t.last_seen = frames.back().timestamp;
    return t;
}

TrackFrameStat stat(int frame, Timestamp ts, long long area, double cx, double cy,
                    double mean = 1.0, double disk = 1.0, double len = 0.0) {
    TrackFrameStat s;
    s.frame_index = frame;
    s.timestamp = ts;
    s.area = area;
    s.centroid_x = cx;
    s.centroid_y = cy;
    s.mean_intensity = mean;
    s.disk_mean = disk;
    s.length_px = len;
    return s;
}

// seed a filament track directly in the store for the eruption tests
EventTrack& seed_filament(TrackStore& store, int id, Timestamp first, Timestamp last,
                          Timestamp step, double cx, double cy, double len = 50.0) {
    EventTrack t;
    t.id = id;
    t.class_id = kClassFilament;
    t.first_seen = first;
    t.last_seen = last;
    int frame = 0;
    for (Timestamp ts = first; ts <= last; ts += step)
        t.frames.push_back(stat(frame++, ts, 120, cx, cy, -0.5, 1.0, len));
    store.tracks().push_back(std::move(t));
    return store.tracks().back();
}

} // namespace

TEST_CASE("extraction on an empty class mask gives nothing") {
    LabelMap map = blank_map(32, 32);
    CHECK(extract_components(map, kClassFilament).empty());
}

TEST_CASE("diagonally touching blocks are one 8-connected component") {
    LabelMap map = blank_map(32, 32);
    paint(map, 2, 2, 6, 6, kClassFilament);   // 5x5
    paint(map, 7, 7, 11, 11, kClassFilament); // corner contact at (6,6)-(7,7)
    auto comps = extract_components(map, kClassFilament);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].area == 50);
    CHECK(comps[0].min_x == 2);
    CHECK(comps[0].max_x == 11);
    CHECK(comps[0].min_y == 2);
    CHECK(comps[0].max_y == 11);
}

TEST_CASE("blobs under the area floor are dropped") {
    LabelMap map = blank_map(32, 32);
    paint(map, 3, 3, 5, 3, kClassFilament); // 3 px
    paint(map, 10, 10, 14, 11, kClassFilament); // 10 px, at the threshold
    auto comps = extract_components(map, kClassFilament, 10);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].area == 10);
}

TEST_CASE("component stats match a hand-built rectangle") {
    LabelMap map = blank_map(40, 20);
    map.frame_index = 7;
    map.timestamp = 123456789;
    paint(map, 5, 4, 14, 9, kClassFlare);
    auto comps = extract_components(map, kClassFlare, 1);
    REQUIRE(comps.size() == 1);
    const Component& c = comps[0];
    CHECK(c.class_id == kClassFlare);
    CHECK(c.area == 60);
    CHECK(c.centroid_x == doctest::Approx(9.5).epsilon(1e-12));
    CHECK(c.centroid_y == doctest::Approx(6.5).epsilon(1e-12));
    CHECK(c.frame_index == 7);
    CHECK(c.timestamp == 123456789);
    // runs are one per row, sorted
    REQUIRE(c.runs.size() == 6);
    for (std::size_t i = 0; i < c.runs.size(); ++i) {
        CHECK(c.runs[i].y == 4 + static_cast<int>(i));
        CHECK(c.runs[i].x0 == 5);
        CHECK(c.runs[i].x1 == 14);
    }
}

TEST_CASE("pixel distance between components") {
    Component a = rect_comp(0, 0, 1, 1);
    Component b = rect_comp(3, 4, 1, 1);
    CHECK(component_distance(a, b) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(component_distance(b, a) == doctest::Approx(5.0).epsilon(1e-12));

    // adjacent pixel centers are 1 apart; shared pixels give zero
    Component c = rect_comp(0, 0, 4, 4);
    Component d = rect_comp(4, 0, 4, 4);
    CHECK(component_distance(c, d) == 1.0);
    Component e = rect_comp(2, 2, 4, 4);
    CHECK(component_distance(c, e) == 0.0);

    // same-row interval gap: runs end at x=2 and start at x=10
    Component f = rect_comp(0, 0, 3, 1);
    Component g = rect_comp(10, 0, 3, 1);
    CHECK(component_distance(f, g) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("filament pieces 20 px apart share a group, 30 px apart do not") {
    // vertical bars: right edge of A at x=9, left edge of B at x=29 or 39
    Component a = rect_comp(5, 10, 5, 12);
    Component near_b = rect_comp(29, 10, 5, 12); // gap 29 - 9 = 20
    Component far_b = rect_comp(39, 10, 5, 12);  // gap 30

    auto one = group_components({a, near_b}, 25.0);
    CHECK(one.size() == 1);
    CHECK(one[0].area == a.area + near_b.area);

    auto two = group_components({a, far_b}, 25.0);
    CHECK(two.size() == 2);
}

TEST_CASE("flare ribbons 100 px apart merge under the flare threshold") {
    Component r1 = rect_comp(10, 50, 40, 6, kClassFlare);  // ends at x=49
    Component r2 = rect_comp(150, 50, 40, 6, kClassFlare); // gap 100
    auto groups = group_components({r1, r2}, 150.0);
    CHECK(groups.size() == 1);
    // the same pair under the filament threshold stays apart
    CHECK(group_components({r1, r2}, 25.0).size() == 2);
}

TEST_CASE("grouping is single-linkage, order-independent, idempotent") {
    // chain: a-b gap 20, b-c gap 20, a-c far apart; single linkage joins all
    Component a = rect_comp(0, 0, 4, 4);
    Component b = rect_comp(23, 0, 4, 4);
    Component c = rect_comp(46, 0, 4, 4);
    auto chain = group_components({a, b, c}, 25.0);
    REQUIRE(chain.size() == 1);
    CHECK(chain[0].area == 48);

    // permutations give identical pixel sets
    Component d = rect_comp(0, 60, 8, 8);
    std::vector<Component> comps = {a, b, c, d};
    auto base = group_signature(group_components(comps, 25.0));
    std::vector<Component> perm = {d, c, a, b};
    CHECK(group_signature(group_components(perm, 25.0)) == base);

    // grouping the groups changes nothing
    auto grouped = group_components(comps, 25.0);
    auto again = group_components(grouped, 25.0);
    CHECK(group_signature(again) == group_signature(grouped));
}

TEST_CASE("grouping at exactly the threshold keeps components separate") {
    // distance exactly 25: strict inequality applies
    Component a = rect_comp(0, 0, 4, 4);
    Component b = rect_comp(28, 0, 4, 4); // gap 28 - 3 = 25
    CHECK(component_distance(a, b) == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(group_components({a, b}, 25.0).size() == 2);
}

TEST_CASE("overlap area counts shared pixels") {
    Component a = rect_comp(0, 0, 10, 10);
    Component b = rect_comp(5, 5, 10, 10);
    CHECK(overlap_area(a, b) == 25);
    CHECK(overlap_area(b, a) == 25);
    Component c = rect_comp(50, 50, 3, 3);
    CHECK(overlap_area(a, c) == 0);
    CHECK(overlap_area(a, a) == 100);
}

TEST_CASE("a sole predecessor hands its id down") {
    TrackStore store(5);
    Component g0 = rect_comp(10, 10, 50, 10);
    auto ids0 = store.update(kClassFilament, 0, 0, {obs(g0)});
    REQUIRE(ids0.size() == 1);
    const int id = ids0[0];

    Component g1 = rect_comp(12, 10, 50, 10); // 48x10 = 480 px overlap
    auto ids1 = store.update(kClassFilament, 1, 60000000, {obs(g1)});
    REQUIRE(ids1.size() == 1);
    CHECK(ids1[0] == id);

    EventTrack* t = store.find(id);
    REQUIRE(t != nullptr);
    CHECK(t->frames.size() == 2);
    CHECK(t->first_seen == 0);
    CHECK(t->last_seen == 60000000);
}

TEST_CASE("zero overlap births a fresh track") {
    TrackStore store(5);
    auto ids0 = store.update(kClassFilament, 0, 0, {obs(rect_comp(10, 10, 20, 4))});
    auto ids1 = store.update(kClassFilament, 1, 60000000,
                             {obs(rect_comp(100, 100, 20, 4))});
    CHECK(ids1[0] != ids0[0]);
    CHECK(store.tracks().size() == 2);
}

TEST_CASE("on a split the larger overlap keeps the id") {
    TrackStore store(5);
    Component ancestor = rect_comp(0, 0, 50, 10); // 500 px
    auto ids0 = store.update(kClassFilament, 0, 0, {obs(ancestor)});
    const int old_id = ids0[0];

    Component left = rect_comp(0, 0, 30, 10);   // 300 px overlap
    Component right = rect_comp(30, 0, 20, 10); // 200 px overlap
    auto ids1 = store.update(kClassFilament, 1, 60000000, {obs(right), obs(left)});
    REQUIRE(ids1.size() == 2);
    CHECK(ids1[1] == old_id); // left, the larger claim
    CHECK(ids1[0] != old_id);
    CHECK(ids1[0] > old_id); // ids only count up
}

TEST_CASE("votes accumulate across the window and expire past it") {
    TrackStore store(5);
    Component g = rect_comp(10, 10, 20, 10);
    auto ids0 = store.update(kClassFilament, 0, 0, {obs(g)});
    const int id = ids0[0];

    // frame 5 still sees the frame-0 history entry
    auto ids5 = store.update(kClassFilament, 5, 5 * 60000000LL, {obs(g)});
    CHECK(ids5[0] == id);

    TrackStore store2(5);
    auto a0 = store2.update(kClassFilament, 0, 0, {obs(g)});
    // frame 6: the frame-0 entry fell out of the window, no votes remain
    auto a6 = store2.update(kClassFilament, 6, 6 * 60000000LL, {obs(g)});
    CHECK(a6[0] != a0[0]);
}

TEST_CASE("retired ids never come back") {
    TrackStore store(5);
    Component g = rect_comp(10, 10, 20, 10);
    auto ids0 = store.update(kClassFilament, 0, 0, {obs(g)});
    const int id = ids0[0];

    auto ended = store.end_stale(kClassFilament, 7, 5);
    REQUIRE(ended.size() == 1);
    CHECK(ended[0] == id);
    CHECK(store.find(id)->status == TrackStatus::Ended);

    // same pixels reappear; the ended id must not be reclaimed
    auto ids7 = store.update(kClassFilament, 7, 7 * 60000000LL, {obs(g)});
    CHECK(ids7[0] != id);
    CHECK(ids7[0] > id);
}

TEST_CASE("end_stale respects the gap boundary") {
    TrackStore store(5);
    store.update(kClassFilament, 0, 0, {obs(rect_comp(10, 10, 20, 10))});
    // last seen at frame 0, now at frame 5, gap 5: 0 < 5 - 5 is false
    CHECK(store.end_stale(kClassFilament, 5, 5).empty());
    CHECK(store.end_stale(kClassFilament, 6, 5).size() == 1);
}

TEST_CASE("end_all closes only the requested class") {
    TrackStore store(5);
    store.update(kClassFilament, 0, 0, {obs(rect_comp(10, 10, 20, 10))});
    store.update(kClassFlare, 0, 0, {obs(rect_comp(60, 60, 20, 10), 3.0)});
    auto ended = store.end_all(kClassFilament);
    CHECK(ended.size() == 1);
    int active = 0;
    for (const EventTrack& t : store.tracks())
        if (t.status == TrackStatus::Active)
            ++active;
    CHECK(active == 1);
    CHECK(store.end_all(kClassFilament).empty()); // already ended
}

TEST_CASE("filaments within the sunspot border radius are removed") {
    Component fil = rect_comp(40, 10, 30, 3);
    Component spot = rect_comp(40, 23, 8, 8, kClassSunspot); // gap 23 - 12 = 10 px
    BinaryMask bright(200, 200);
    auto kept = filter_false_filaments({fil}, {spot}, bright, DiskGeometry{}, 20.0, 0.6);
    CHECK(kept.empty());

    Component far_spot = rect_comp(40, 40, 8, 8, kClassSunspot); // gap 27 px
    auto kept2 = filter_false_filaments({fil}, {far_spot}, bright, DiskGeometry{}, 20.0, 0.6);
    REQUIRE(kept2.size() == 1);
    CHECK(kept2[0].area == fil.area);
}

TEST_CASE("round blobs inside bright regions are removed, bars survive") {
    // a filled disk of radius 9 at (60,60)
    Component blob;
    blob.class_id = kClassFilament;
    for (int y = 51; y <= 69; ++y) {
        int x0 = 999, x1 = -999;
        for (int x = 51; x <= 69; ++x)
            if ((x - 60) * (x - 60) + (y - 60) * (y - 60) <= 81) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
            }
        if (x1 >= x0)
            blob.runs.push_back({y, x0, x1});
    }
    recompute_component_stats(blob);
    CHECK(component_compactness(blob) > 0.9);

    Component bar = rect_comp(100, 100, 120, 3);
    CHECK(component_compactness(bar) < 0.3);

    BinaryMask bright(400, 400);
    for (int y = 0; y < 400; ++y)
        for (int x = 0; x < 400; ++x)
            bright.set(x, y); // everything sits in plage

    auto kept = filter_false_filaments({blob, bar}, {}, bright, DiskGeometry{}, 20.0, 0.6);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].area == bar.area);

    // outside bright regions the same blob is left alone
    BinaryMask dark(400, 400);
    auto kept2 = filter_false_filaments({blob, bar}, {}, dark, DiskGeometry{}, 20.0, 0.6);
    CHECK(kept2.size() == 2);
}

TEST_CASE("thinning leaves 1-px structures alone") {
    Component line = rect_comp(5, 5, 12, 1);
    auto skel = skeletonize(line);
    std::set<std::pair<int, int>> got(skel.begin(), skel.end());
    std::set<std::pair<int, int>> want;
    for (int x = 5; x < 17; ++x)
        want.insert({x, 5});
    CHECK(got == want);

    Component dot = rect_comp(9, 9, 1, 1);
    auto single = skeletonize(dot);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == std::pair<int, int>{9, 9});
}

TEST_CASE("a filled rectangle thins to a width-1 path") {
    Component rect = rect_comp(10, 10, 20, 5);
    auto skel = skeletonize(rect);
    std::set<std::pair<int, int>> px(skel.begin(), skel.end());
    REQUIRE(!px.empty());

    // no 2x2 block fully set
    for (auto [x, y] : px) {
        const bool block = px.count({x + 1, y}) && px.count({x, y + 1}) &&
                           px.count({x + 1, y + 1});
        CHECK(!block);
    }

    // exactly two endpoints (pixels with a single neighbor)
    int endpoints = 0;
    for (auto [x, y] : px)
        if (neighbor_count(px, x, y) == 1)
            ++endpoints;
    CHECK(endpoints == 2);

    const double len = skeleton_length(skel);
    CHECK(len >= 13.0);
    CHECK(len <= 20.0);
}

TEST_CASE("skeleton length of straight and diagonal lines") {
    std::vector<std::pair<int, int>> hline;
    for (int x = 0; x < 11; ++x)
        hline.push_back({x, 3});
    CHECK(skeleton_length(hline) == 10.0);

    std::vector<std::pair<int, int>> diag;
    for (int i = 0; i < 11; ++i)
        diag.push_back({i, i});
    CHECK(skeleton_length(diag) == doctest::Approx(10.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("axis-aligned lines measure n-1 exactly") {
    for (int n : {2, 3, 5, 11, 37}) {
        std::vector<std::pair<int, int>> line;
        for (int y = 0; y < n; ++y)
            line.push_back({8, y});
        CHECK(skeleton_length(line) == static_cast<double>(n - 1));
    }
}

TEST_CASE("Y skeleton diameter is the longest leaf pair") {
    std::vector<std::pair<int, int>> y_shape;
    y_shape.push_back({20, 20});
    for (int i = 1; i <= 10; ++i) {
        y_shape.push_back({20 - i, 20}); // left arm, 10 edges
        y_shape.push_back({20 + i, 20}); // right arm, 10 edges
    }
    for (int i = 1; i <= 4; ++i)
        y_shape.push_back({20, 20 + i}); // stem, 4 edges
    CHECK(skeleton_length(y_shape) == 20.0);
}

TEST_CASE("the two diameter searches agree exactly on trees") {
    std::vector<std::vector<std::pair<int, int>>> fixtures;

    std::vector<std::pair<int, int>> hline;
    for (int x = 0; x < 11; ++x)
        hline.push_back({x, 0});
    fixtures.push_back(hline);

    std::vector<std::pair<int, int>> diag;
    for (int i = 0; i < 11; ++i)
        diag.push_back({i, i});
    fixtures.push_back(diag);

    std::vector<std::pair<int, int>> y_shape = {{20, 20}};
    for (int i = 1; i <= 10; ++i) {
        y_shape.push_back({20 - i, 20});
        y_shape.push_back({20 + i, 20});
    }
    for (int i = 1; i <= 4; ++i)
        y_shape.push_back({20, 20 + i});
    fixtures.push_back(y_shape);

    // an L with a diagonal tail
    std::vector<std::pair<int, int>> bent;
    for (int x = 0; x <= 6; ++x)
        bent.push_back({x, 0});
    for (int y = 1; y <= 5; ++y)
        bent.push_back({6, y});
    for (int i = 1; i <= 4; ++i)
        bent.push_back({6 + i, 5 + i});
    fixtures.push_back(bent);

    fixtures.push_back(skeletonize(rect_comp(10, 10, 20, 5)));

    for (const auto& skel : fixtures) {
        const double fw = skeleton_length_floyd_warshall(skel);
        const double ts = skeleton_length_two_sweep(skel);
        CHECK(fw == ts);
        CHECK(skeleton_length(skel) == fw);
    }
}

TEST_CASE("degenerate skeletons have zero length") {
    CHECK(skeleton_length({}) == 0.0);
    CHECK(skeleton_length({{4, 4}}) == 0.0);
}

TEST_CASE("importance classes follow the area table") {
    CHECK(importance_from_sq_deg(1.0) == "S");
    CHECK(importance_from_sq_deg(2.0) == "S");
    CHECK(importance_from_sq_deg(2.1) == "1");
    CHECK(importance_from_sq_deg(3.0) == "1");
    CHECK(importance_from_sq_deg(5.1) == "1");
    CHECK(importance_from_sq_deg(5.2) == "2");
    CHECK(importance_from_sq_deg(12.4) == "2");
    CHECK(importance_from_sq_deg(12.5) == "3");
    CHECK(importance_from_sq_deg(24.7) == "3");
    CHECK(importance_from_sq_deg(24.8) == "4");
    CHECK(importance_from_sq_deg(100.0) == "4");
}

TEST_CASE("importance is monotone in corrected area") {
    const std::vector<std::string> rank = {"S", "1", "2", "3", "4"};
    auto rank_of = [&](const std::string& s) {
        return std::find(rank.begin(), rank.end(), s) - rank.begin();
    };
    long prev = 0;
    for (double sq = 0.0; sq <= 30.0; sq += 0.05) {
        const long r = rank_of(importance_from_sq_deg(sq));
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("a disk-center flare in the category-1 band reports importance 1") {
    DiskGeometry geom{300.0, 300.0, 200.0};
    // 37 px at disk center: 37e6 / (2*pi*200^2) = 147.2 msh = 3.04 sq deg
    EventTrack t = flare_track(1, {stat(0, 0, 37, 300.0, 300.0, 2.0, 1.0)});
    FlareReport rep = classify_flare(t, geom);
    CHECK(rep.importance == "1");
    CHECK(rep.area_msh ==
          doctest::Approx(37.0e6 / (2.0 * M_PI * 200.0 * 200.0)).epsilon(1e-12));
    CHECK(rep.lat_deg == doctest::Approx(0.0).scale(1).epsilon(1e-9));
    CHECK(rep.lon_deg == doctest::Approx(0.0).scale(1).epsilon(1e-9));

    // 12 px = 0.98 sq deg: subflare, below the category-1 cut
    EventTrack small = flare_track(2, {stat(0, 0, 12, 300.0, 300.0, 2.0, 1.0)});
    CHECK(classify_flare(small, geom).importance == "S");
}

TEST_CASE("foreshortening at 60 degrees doubles the corrected area") {
    DiskGeometry geom{300.0, 300.0, 200.0};
    EventTrack center = flare_track(1, {stat(0, 0, 500, 300.0, 300.0, 2.0, 1.0)});
    const double offset = 200.0 * std::sqrt(3.0) / 2.0; // projected radius of 60 deg
    EventTrack limbward = flare_track(2, {stat(0, 0, 500, 300.0 + offset, 300.0, 2.0, 1.0)});
    const double msh_center = classify_flare(center, geom).area_msh;
    const double msh_limb = classify_flare(limbward, geom).area_msh;
    CHECK(msh_limb == doctest::Approx(2.0 * msh_center).epsilon(1e-9));
}

TEST_CASE("flare report brackets the track and peaks at maximum intensity") {
    DiskGeometry geom{300.0, 300.0, 200.0};
    const Timestamp t0 = 1000000000;
    EventTrack t = flare_track(4, {
        stat(0, t0, 100, 300.0, 300.0, 1.2, 1.0),
        stat(1, t0 + 60000000, 180, 302.0, 300.0, 1.9, 1.05),
        stat(2, t0 + 120000000, 120, 304.0, 300.0, 1.4, 1.0),
    });
    FlareReport rep = classify_flare(t, geom);
    CHECK(rep.start == t0);
    CHECK(rep.peak == t0 + 60000000);
    CHECK(rep.end == t0 + 120000000);
    CHECK(rep.start <= rep.peak);
    CHECK(rep.peak <= rep.end);
    CHECK(rep.rel_intensity == doctest::Approx(1.9 / 1.05).epsilon(1e-12));
    // the corrected area is the maximum over frames (here frame 1)
    CHECK(rep.area_msh >= 180.0e6 / (2.0 * M_PI * 200.0 * 200.0) - 1e-9);

    // an intensity tie resolves to the earliest frame
    EventTrack tie = flare_track(5, {
        stat(0, t0, 100, 300.0, 300.0, 2.0, 1.0),
        stat(1, t0 + 60000000, 100, 300.0, 300.0, 2.0, 1.0),
    });
    CHECK(classify_flare(tie, geom).peak == t0);
}

TEST_CASE("photometric stats narrow the report to the half-maximum window") {
    DiskGeometry geom{300.0, 300.0, 200.0};
    const Timestamp t0 = 1000000000;
    const Timestamp step = 30000000;
    // brightening profile 0.4 / 1.2 / 2.0 / 1.3 / 0.45: frames 1..3 sit at or
    // above half the peak, the segmented areas (300 px) stay out of the report
    std::vector<TrackFrameStat> frames;
    const double excess[] = {0.4, 1.2, 2.0, 1.3, 0.45};
    const long long half_area[] = {50, 80, 100, 70, 40};
    for (int i = 0; i < 5; ++i) {
        TrackFrameStat s = stat(i, t0 + i * step, 300, 300.0, 300.0, 1.5, 1.0);
        s.peak_excess = excess[i];
        s.area_half = half_area[i];
        frames.push_back(s);
    }
    EventTrack t = flare_track(9, frames);
    FlareReport rep = classify_flare(t, geom);
    CHECK(rep.start == t0 + 1 * step);
    CHECK(rep.peak == t0 + 2 * step);
    CHECK(rep.end == t0 + 3 * step);
    // area comes from the largest half-maximum count inside the window
    CHECK(rep.area_msh == doctest::Approx(100.0e6 / (2.0 * M_PI * 200.0 * 200.0)).epsilon(1e-12));
}

TEST_CASE("a centroid beyond the limb raises OffDiskCentroid") {
    DiskGeometry geom{300.0, 300.0, 200.0};
    EventTrack t = flare_track(1, {stat(0, 0, 50, 300.0 + 210.0, 300.0, 2.0, 1.0)});
    CHECK_THROWS_WITH_AS(classify_flare(t, geom), doctest::Contains("OffDiskCentroid"), Error);
}

TEST_CASE("a long-lived filament absent past the window erupts") {
    DiskGeometry geom{300.0, 300.0, 200.0};
    TrackStore store;
    // seen for two hours at radial 0.4, every 10 minutes
    const Timestamp last = 7200000000LL;
    seed_filament(store, 1, 0, last, 600000000LL, 300.0 + 80.0, 300.0, 64.5);

    // absent only 10 minutes: nothing yet
    auto none = detect_eruptions(store, last + 600000000LL, 900.0, geom);
    CHECK(none.empty());
    CHECK(store.find(1)->status == TrackStatus::Active);

    // absent a full 15 minutes: the eruption fires
    const Timestamp now = last + 900000000LL;
    auto reports = detect_eruptions(store, now, 900.0, geom);
    REQUIRE(reports.size() == 1);
    const EruptionReport& rep = reports[0];
    CHECK(rep.id == 1);
    CHECK(rep.start == 0);
    CHECK(rep.disappearance == now);
    CHECK(rep.disappearance - store.find(1)->last_seen >= 900000000LL);
    CHECK(rep.length_px == doctest::Approx(64.5).epsilon(1e-12));
    CHECK(store.find(1)->status == TrackStatus::Erupted);

    // once per track: a later sweep stays quiet
    CHECK(detect_eruptions(store, now + 3600000000LL, 900.0, geom).empty());
}

TEST_CASE("a filament vanishing at the limb ends without a report") {
    DiskGeometry geom{300.0, 300.0, 200.0};
    TrackStore store;
    const Timestamp last = 7200000000LL;
    seed_filament(store, 1, 0, last, 600000000LL, 300.0 + 0.97 * 200.0, 300.0);
    auto reports = detect_eruptions(store, last + 900000000LL, 900.0, geom);
    CHECK(reports.empty());
    CHECK(store.find(1)->status == TrackStatus::Ended);
}

TEST_CASE("short-lived filaments never erupt") {
    DiskGeometry geom{300.0, 300.0, 200.0};
    TrackStore store;
    const Timestamp last = 600000000LL;
    seed_filament(store, 1, 0, last, 600000000LL, 300.0 + 80.0, 300.0); // 2 frames
    auto reports = detect_eruptions(store, last + 900000000LL, 900.0, geom);
    CHECK(reports.empty());
}

TEST_CASE("flare records carry exactly the flare fields in order") {
    FlareReport rep;
    rep.id = 12;
    rep.start = 1000000000;
    rep.peak = 1060000000;
    rep.end = 1120000000;
    rep.importance = "2";
    rep.lat_deg = 12.5;
    rep.lon_deg = -33.25;
    rep.area_msh = 310.75;
    rep.rel_intensity = 1.42;

    const std::string line = flare_to_ndjson(rep);
    CHECK(line.find('\n') == std::string::npos);
    auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it)
        keys.push_back(it.key());
    const std::vector<std::string> want = {"type", "id",      "start",    "peak",
                                           "end",  "importance", "lat_deg", "lon_deg",
                                           "area_msh", "rel_intensity"};
    CHECK(keys == want);
    CHECK(j["type"] == "flare");
    CHECK(j["id"] == 12);
    CHECK(j["importance"] == "2");
    CHECK(parse_rfc3339(j["start"].get<std::string>()).value() == rep.start);
    CHECK(parse_rfc3339(j["peak"].get<std::string>()).value() == rep.peak);
    CHECK(parse_rfc3339(j["end"].get<std::string>()).value() == rep.end);
    CHECK(j["lat_deg"].get<double>() == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(j["area_msh"].get<double>() == doctest::Approx(310.75).epsilon(1e-12));
    CHECK(j["rel_intensity"].get<double>() == doctest::Approx(1.42).epsilon(1e-12));
}

TEST_CASE("eruption records omit the flare-only fields") {
    EruptionReport rep;
    rep.id = 7;
    rep.start = 2000000000;
    rep.disappearance = 9200000000;
    rep.lat_deg = -5.0;
    rep.lon_deg = 14.0;
    rep.length_px = 88.25;

    const std::string line = eruption_to_ndjson(rep);
    auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it)
        keys.push_back(it.key());
    const std::vector<std::string> want = {"type",    "id",      "start", "end",
                                           "lat_deg", "lon_deg", "length_px"};
    CHECK(keys == want);
    CHECK(j["type"] == "filament_eruption");
    CHECK(!j.contains("importance"));
    CHECK(!j.contains("area_msh"));
    CHECK(!j.contains("rel_intensity"));
    CHECK(!j.contains("peak"));
    CHECK(parse_rfc3339(j["start"].get<std::string>()).value() == rep.start);
    CHECK(parse_rfc3339(j["end"].get<std::string>()).value() == rep.disappearance);
    CHECK(j["length_px"].get<double>() == doctest::Approx(88.25).epsilon(1e-12));
}
