#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <tuple>

#include "cascades.hpp"
#include "exprlbp/detect.hpp"
#include "exprlbp/error.hpp"
#include "exprlbp/review.hpp"
#include "oracles.hpp"

using namespace exprlbp;

namespace {

std::string cascade_error(const std::string& json) {
  try {
    load_cascade(json);
  } catch (const DataError& e) {
    return e.what();
  }
  FAIL("expected DataError");
  return {};
}

const char* kMinimal = R"({
  "format": "exprlbp-cascade-1", "base_w": 24, "base_h": 20,
  "stages": [ { "threshold": 0.25,
                "weak": [ { "threshold": -0.5, "left": 0.1, "right": 0.9,
                            "rects": [ {"x": 0, "y": 0, "w": 12, "h": 20, "weight": 1.0},
                                       {"x": 12, "y": 0, "w": 12, "h": 20, "weight": -1.0} ] } ] } ] })";

// Random cascade on a 4x4 base; thresholds land where both outcomes occur.
HaarCascade random_small_cascade(std::mt19937& rng, bool zero_sum) {
  std::uniform_int_distribution<int> coord(0, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HaarCascade c{4, 4, {}};
  const int n_stages = 1 + static_cast<int>(rng() % 3);
  for (int s = 0; s < n_stages; ++s) {
    Stage st;
    const int n_weak = 1 + static_cast<int>(rng() % 3);
    double hi = 0.0;
    for (int w = 0; w < n_weak; ++w) {
      WeakClassifier wc;
      const int n_rects = 2 + static_cast<int>(rng() % 2);
      for (int r = 0; r < n_rects; ++r) {
        const int x = coord(rng), y = coord(rng);
        const int rw = 1 + static_cast<int>(rng() % (4 - x));
        const int rh = 1 + static_cast<int>(rng() % (4 - y));
        wc.feature.rects.push_back({{x, y, rw, rh}, u(rng) * 3.0});
      }
      if (zero_sum) {
        // Fix the last weight so that sum(weight * area) = 0.
        double acc = 0.0;
        for (std::size_t r = 0; r + 1 < wc.feature.rects.size(); ++r)
          acc += wc.feature.rects[r].weight * wc.feature.rects[r].rect.area();
        wc.feature.rects.back().weight = -acc / wc.feature.rects.back().rect.area();
      }
      wc.threshold = u(rng) * 0.2;
      wc.left_val = u(rng);
      wc.right_val = u(rng);
      hi += std::max(wc.left_val, wc.right_val);
      st.weak.push_back(std::move(wc));
    }
    st.stage_threshold = hi - 0.5 * std::abs(u(rng));
    c.stages.push_back(std::move(st));
  }
  return c;
}

std::vector<Detection> oracle_grouping(const std::vector<Rect>& rects, int min_neighbors) {
  const auto comp = oracle::components(rects);
  std::map<int, std::vector<Rect>> members;
  for (std::size_t i = 0; i < rects.size(); ++i) members[comp[i]].push_back(rects[i]);
  std::vector<Detection> out;
  for (const auto& [id, rs] : members) {
    if (static_cast<int>(rs.size()) < min_neighbors) continue;
    double x = 0, y = 0, w = 0, h = 0;
    for (const auto& r : rs) {
      x += r.x;
      y += r.y;
      w += r.w;
      h += r.h;
    }
    const double n = static_cast<double>(rs.size());
    out.push_back({{static_cast<int>(std::lround(x / n)), static_cast<int>(std::lround(y / n)),
                    static_cast<int>(std::lround(w / n)), static_cast<int>(std::lround(h / n))},
                   static_cast<int>(rs.size())});
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    return std::tie(a.rect.y, a.rect.x, a.rect.w, a.rect.h) <
           std::tie(b.rect.y, b.rect.x, b.rect.w, b.rect.h);
  });
  return out;
}

}  // namespace

TEST_CASE("load_cascade") {
  SUBCASE("minimal document loads with its values") {
    const HaarCascade c = load_cascade(kMinimal);
    CHECK(c.base_w == 24);
    CHECK(c.base_h == 20);
    REQUIRE(c.stages.size() == 1);
    CHECK(c.stages[0].stage_threshold == 0.25);
    REQUIRE(c.stages[0].weak.size() == 1);
    const auto& wc = c.stages[0].weak[0];
    CHECK(wc.threshold == -0.5);
    CHECK(wc.left_val == 0.1);
    CHECK(wc.right_val == 0.9);
    REQUIRE(wc.feature.rects.size() == 2);
    CHECK(wc.feature.rects[1].rect == Rect{12, 0, 12, 20});
    CHECK(wc.feature.rects[1].weight == -1.0);
  }

  SUBCASE("rect outside the base window names its path") {
    std::string bad = kMinimal;
    bad.replace(bad.find("\"x\": 12"), 7, "\"x\": 13");
    const std::string msg = cascade_error(bad);
    CHECK(msg.find("stages[0].weak[0].rects[1]") != std::string::npos);
    CHECK(msg.find("24x20") != std::string::npos);
  }

  SUBCASE("schema violations") {
    CHECK(cascade_error("{").find("invalid JSON") != std::string::npos);
    CHECK(cascade_error(R"({"format": "other", "base_w": 24, "base_h": 24, "stages": []})")
              .find("format") != std::string::npos);
    std::string missing = kMinimal;
    missing.replace(missing.find("\"left\""), 6, "\"lft\"");
    CHECK(cascade_error(missing).find("stages[0].weak[0]: missing \"left\"") != std::string::npos);
    std::string one_rect = R"({"format": "exprlbp-cascade-1", "base_w": 8, "base_h": 8, "stages": [
      {"threshold": 0, "weak": [{"threshold": 0, "left": 0, "right": 1,
        "rects": [{"x": 0, "y": 0, "w": 2, "h": 2, "weight": 1}]}]}]})";
    CHECK(cascade_error(one_rect).find("need 2 or 3 rects") != std::string::npos);
    CHECK(cascade_error(R"({"format": "exprlbp-cascade-1", "base_w": 3, "base_h": 8, "stages": []})")
              .find("smaller than 4x4") != std::string::npos);
  }

  SUBCASE("emitter round trip") {
    std::mt19937 rng(51);
    for (int t = 0; t < 20; ++t) {
      const HaarCascade c = random_small_cascade(rng, t % 2 == 0);
      const std::string json = cascade_to_json(c);
      CHECK(cascade_to_json(load_cascade(json)) == json);
    }
    const HaarCascade sq = fixtures::bright_square();
    CHECK(cascade_to_json(load_cascade(cascade_to_json(sq))) == cascade_to_json(sq));
  }
}

TEST_CASE("eval_window") {
  std::mt19937 rng(52);
  const GrayImage img = oracle::random_image(rng, 40, 30);
  const IntegralImage ii(img);

  SUBCASE("always-pass and always-fail constructions") {
    for (int t = 0; t < 100; ++t) {
      const int w = 24 + static_cast<int>(rng() % 7);
      const Rect win{static_cast<int>(rng() % (40 - w + 1)), static_cast<int>(rng() % 3), w, 24 + w % 5};
      CHECK(eval_window(fixtures::always_pass(), ii, win));
      CHECK_FALSE(eval_window(fixtures::always_fail(), ii, win));
    }
  }

  SUBCASE("matches the naive evaluator on 8x8 images at scales 1 and 2") {
    int accepted = 0, total = 0;
    for (int t = 0; t < 300; ++t) {
      const HaarCascade c = random_small_cascade(rng, false);
      const GrayImage small = oracle::random_image(rng, 8, 8);
      const IntegralImage sii(small);
      for (int y = 0; y <= 4; ++y) {
        for (int x = 0; x <= 4; ++x) {
          const bool got = eval_window(c, sii, {x, y, 4, 4});
          REQUIRE(got == oracle::eval_window_naive(c, small, {x, y, 4, 4}));
          accepted += got;
          ++total;
        }
      }
      const bool got = eval_window(c, sii, {0, 0, 8, 8});
      REQUIRE(got == oracle::eval_window_naive(c, small, {0, 0, 8, 8}));
      accepted += got;
      ++total;
    }
    // Both outcomes must actually be exercised.
    CHECK(accepted > total / 10);
    CHECK(accepted < total * 9 / 10);
  }

  SUBCASE("zero-sum cascades are invariant to affine intensity changes") {
    int accepted = 0, total = 0;
    for (int t = 0; t < 200; ++t) {
      const HaarCascade c = random_small_cascade(rng, true);
      const GrayImage base = oracle::random_image(rng, 30, 30, 10, 120);
      const int a = 1 + static_cast<int>(rng() % 2);
      const int b = static_cast<int>(rng() % 15);
      GrayImage shifted = base;
      for (auto& p : shifted.pixels()) p = static_cast<std::uint8_t>(a * p + b);
      const IntegralImage i0(base), i1(shifted);
      for (int k = 0; k < 10; ++k) {
        const int w = 4 + static_cast<int>(rng() % 20);
        const Rect win{static_cast<int>(rng() % (31 - w)), static_cast<int>(rng() % (31 - w)), w, w};
        const bool got = eval_window(c, i0, win);
        REQUIRE(got == eval_window(c, i1, win));
        accepted += got;
        ++total;
      }
    }
    CHECK(accepted > 0);
    CHECK(accepted < total);
  }

  SUBCASE("bad windows") {
    CHECK_THROWS_AS(eval_window(fixtures::always_pass(), ii, {20, 0, 24, 24}), DataError);
    CHECK_THROWS_AS(eval_window(fixtures::always_pass(), ii, {0, 0, 20, 20}), DataError);
  }
}

TEST_CASE("group_detections") {
  SUBCASE("three identical rects merge") {
    const std::vector<Rect> raw(3, Rect{5, 6, 20, 20});
    const auto out = group_detections(raw, 3);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == Detection{{5, 6, 20, 20}, 3});
    CHECK(group_detections(raw, 4).empty());
  }

  SUBCASE("two far-apart rects stay separate") {
    const std::vector<Rect> raw{{100, 0, 10, 10}, {0, 0, 10, 10}};
    const auto out = group_detections(raw, 1);
    REQUIRE(out.size() == 2);
    CHECK(out[0].rect == Rect{0, 0, 10, 10});
    CHECK(out[1].rect == Rect{100, 0, 10, 10});
  }

  SUBCASE("clustering is transitive") {
    // a~b and b~c overlap enough, a~c does not.
    const Rect a{0, 0, 10, 10}, b{2, 0, 10, 10}, c{4, 0, 10, 10};
    REQUIRE(iou(a, c) < 0.5);
    const auto out = group_detections(std::vector<Rect>{a, c, b}, 1);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == Detection{{2, 0, 10, 10}, 3});
  }

  SUBCASE("matches the breadth-first oracle on random clusters") {
    std::mt19937 rng(53);
    for (int t = 0; t < 200; ++t) {
      std::vector<Rect> raw;
      const int clusters = 1 + static_cast<int>(rng() % 5);
      for (int k = 0; k < clusters; ++k) {
        const int cx = static_cast<int>(rng() % 200), cy = static_cast<int>(rng() % 200);
        const int size = 10 + static_cast<int>(rng() % 30);
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
          const int jitter = size / 4 + 1;
          raw.push_back({cx + static_cast<int>(rng() % jitter), cy + static_cast<int>(rng() % jitter),
                         size + static_cast<int>(rng() % jitter), size + static_cast<int>(rng() % jitter)});
        }
      }
      std::shuffle(raw.begin(), raw.end(), rng);
      const int min_n = static_cast<int>(rng() % 4);
      REQUIRE(group_detections(raw, min_n) == oracle_grouping(raw, min_n));
    }
  }

  SUBCASE("regrouping well-separated output is the identity") {
    std::mt19937 rng(54);
    for (int t = 0; t < 100; ++t) {
      std::vector<Rect> raw;
      for (int k = 0; k < 4; ++k) {
        for (int i = 0; i < 5; ++i) {
          raw.push_back({k * 60 + static_cast<int>(rng() % 4), static_cast<int>(rng() % 4),
                         30 + static_cast<int>(rng() % 4), 30 + static_cast<int>(rng() % 4)});
        }
      }
      const auto once = group_detections(raw, 1);
      std::vector<Rect> rects;
      for (const auto& d : once) rects.push_back(d.rect);
      const auto twice = group_detections(rects, 1);
      REQUIRE(twice.size() == once.size());
      for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(twice[i].rect == once[i].rect);
        CHECK(twice[i].neighbors == 1);
      }
    }
  }

  SUBCASE("empty input") { CHECK(group_detections(std::vector<Rect>{}, 0).empty()); }
}

TEST_CASE("detect_faces") {
  DetectParams p;

  SUBCASE("always-fail finds nothing") {
    std::mt19937 rng(55);
    CHECK(detect_faces(oracle::random_image(rng, 90, 70), fixtures::always_fail(), p).empty());
  }

  SUBCASE("always-pass on a base-sized image gives one raw hit") {
    const GrayImage img(24, 24, 90);
    const auto raw = raw_detections(img, fixtures::always_pass(), p);
    REQUIRE(raw.size() == 1);
    CHECK(raw[0] == Rect{0, 0, 24, 24});
    p.min_neighbors = 1;
    CHECK(detect_faces(img, fixtures::always_pass(), p) == std::vector<Detection>{{{0, 0, 24, 24}, 1}});
    p.min_neighbors = 2;
    CHECK(detect_faces(img, fixtures::always_pass(), p).empty());
  }

  SUBCASE("image smaller than the base window") {
    CHECK(detect_faces(GrayImage(20, 30, 0), fixtures::always_pass(), p).empty());
  }

  SUBCASE("window enumeration follows the pyramid and step rules") {
    // 24x24 base on 40x30: sizes 24 and 29 (34 exceeds the height); steps 2 and 2.
    const auto raw = raw_detections(GrayImage(40, 30, 0), fixtures::always_pass(), p);
    const std::size_t n24 = (16 / 2 + 1) * (6 / 2 + 1);
    const std::size_t n29 = (11 / 2 + 1) * (1 / 2 + 1);
    CHECK(raw.size() == n24 + n29);
    p.min_size = 25;
    CHECK(raw_detections(GrayImage(40, 30, 0), fixtures::always_pass(), p).size() == n29);
  }

  SUBCASE("bright square is found within 2 px") {
    std::mt19937 rng(56);
    p.step = 1;
    for (const auto& [x, y, side] : std::vector<std::tuple<int, int, int>>{
             {40, 30, 24}, {10, 12, 12}, {55, 8, 30}, {20, 35, 18}}) {
      const GrayImage img = fixtures::square_scene(110, 80, x, y, side, &rng);
      const auto dets = detect_faces(img, fixtures::bright_square(), p);
      REQUIRE(dets.size() == 1);
      const Rect want = fixtures::expected_frame(x, y, side);
      const Rect got = dets[0].rect;
      CHECK(std::abs(got.x - want.x) <= 2);
      CHECK(std::abs(got.y - want.y) <= 2);
      CHECK(std::abs(got.w - want.w) <= 2);
      CHECK(std::abs(got.h - want.h) <= 2);
    }
  }

  SUBCASE("output lies within the image and matches the serial reference") {
    std::mt19937 rng(57);
    for (int t = 0; t < 20; ++t) {
      const int w = 24 + static_cast<int>(rng() % 60), h = 24 + static_cast<int>(rng() % 60);
      const GrayImage img = oracle::random_image(rng, w, h);
      DetectParams q;
      q.scale_factor = 1.1 + 0.05 * (t % 4);
      q.step = 1 + t % 3;
      q.min_neighbors = t % 3;
      HaarCascade c = fixtures::always_pass();
      c.stages[0].weak[0].threshold = 0.0;  // random subset of windows
      const auto dets = detect_faces(img, c, q);
      for (const auto& d : dets) {
        CHECK(d.rect.x >= 0);
        CHECK(d.rect.y >= 0);
        CHECK(d.rect.x + d.rect.w <= w);
        CHECK(d.rect.y + d.rect.h <= h);
      }
      CHECK(dets == serial::detect_faces(img, c, q));
      CHECK(raw_detections(img, c, q) == serial::raw_detections(img, c, q));
    }
  }

  SUBCASE("parameter validation") {
    const GrayImage img(30, 30, 0);
    CHECK_THROWS_AS(detect_faces(img, fixtures::always_pass(), {1.0, 2, 3, 0}), DataError);
    CHECK_THROWS_AS(detect_faces(img, fixtures::always_pass(), {1.2, 0, 3, 0}), DataError);
    CHECK_THROWS_AS(detect_faces(img, fixtures::always_pass(), {1.2, 2, -1, 0}), DataError);
  }
}

TEST_CASE("best_detection") {
  CHECK_FALSE(best_detection(std::vector<Detection>{}).has_value());
  const std::vector<Detection> dets{{{0, 0, 10, 10}, 3}, {{50, 0, 20, 20}, 5}, {{0, 50, 30, 30}, 5}};
  CHECK(best_detection(dets)->rect == Rect{0, 50, 30, 30});
}

TEST_CASE("review manifest") {
  const std::vector<ReviewEntry> entries{{"a/b.pgm", {1, 2, 3, 4}, 5, true},
                                         {"c.pgm", {0, 0, 24, 24}, 1, false}};
  const std::string text = save_review_csv(entries);
  CHECK(text == "image,x,y,w,h,neighbors,keep\na/b.pgm,1,2,3,4,5,1\nc.pgm,0,0,24,24,1,0\n");
  CHECK(load_review_csv(text) == entries);
  CHECK(load_review_csv("# edited by hand\r\n" + text + "\n# trailing\n") == entries);

  CHECK_THROWS_AS(load_review_csv(""), DataError);
  CHECK_THROWS_AS(load_review_csv("image,x\n"), DataError);
  CHECK_THROWS_AS(load_review_csv(text + "d.pgm,1,2,3,4,5\n"), DataError);
  CHECK_THROWS_AS(load_review_csv(text + "d.pgm,1,2,3,4,5,2\n"), DataError);
  CHECK_THROWS_AS(load_review_csv(text + "d.pgm,1,2,x,4,5,1\n"), DataError);
  CHECK_THROWS_AS(save_review_csv({{"bad,name.pgm", {0, 0, 1, 1}, 1, true}}), DataError);
}
