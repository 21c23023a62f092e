#include "latomo/phantom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace latomo {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool contains(const Ellipse& e, Point2 p) {
  const double dx = p.x - e.center.x;
  const double dy = p.y - e.center.y;
  const double c = std::cos(e.rotation_deg * kDeg);
  const double s = std::sin(e.rotation_deg * kDeg);
  const double u = (dx * c + dy * s) / e.semi_x;
  const double v = (-dx * s + dy * c) / e.semi_y;
  return u * u + v * v <= 1.0;
}

bool contains(const Bar& b, Point2 p) {
  const double x0 = b.center.x - 0.5 * b.width;
  const double y0 = b.center.y - 0.5 * b.height;
  return p.x >= x0 && p.x < x0 + b.width && p.y >= y0 && p.y < y0 + b.height;
}

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

void PhantomSpec::validate() const {
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const bool ok = std::visit(
        [](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Ellipse>) {
            return p.semi_x > 0 && p.semi_y > 0 && std::isfinite(p.semi_x) &&
                   std::isfinite(p.semi_y) && std::isfinite(p.value_hu) &&
                   std::isfinite(p.rotation_deg) && std::isfinite(p.center.x) &&
                   std::isfinite(p.center.y);
          } else {
            return p.width > 0 && p.height > 0 && std::isfinite(p.width) &&
                   std::isfinite(p.height) && std::isfinite(p.value_hu) &&
                   std::isfinite(p.center.x) && std::isfinite(p.center.y);
          }
        },
        primitives[i]);
    if (!ok) {
      throw std::invalid_argument("phantom primitive " + std::to_string(i + 1) +
                                  ": extents must be positive and values finite");
    }
  }
  if (roi && !(roi->xmax > roi->xmin && roi->ymax > roi->ymin)) {
    throw std::invalid_argument("phantom roi: max must exceed min");
  }
}

RoiMm bounding_box(const Primitive& prim) {
  return std::visit(
      [](const auto& p) -> RoiMm {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Ellipse>) {
          const double c = std::cos(p.rotation_deg * kDeg);
          const double s = std::sin(p.rotation_deg * kDeg);
          const double hx = std::hypot(p.semi_x * c, p.semi_y * s);
          const double hy = std::hypot(p.semi_x * s, p.semi_y * c);
          return {p.center.x - hx, p.center.y - hy, p.center.x + hx, p.center.y + hy};
        } else {
          return {p.center.x - 0.5 * p.width, p.center.y - 0.5 * p.height,
                  p.center.x + 0.5 * p.width, p.center.y + 0.5 * p.height};
        }
      },
      prim);
}

double PhantomSpec::extent_radius() const {
  double r = 0.0;
  for (const auto& p : primitives) {
    if (const auto* e = std::get_if<Ellipse>(&p)) {
      // Dense boundary sampling; the chord error at 4096 samples is far below a pixel.
      constexpr int kSamples = 4096;
      const double rot = e->rotation_deg * std::numbers::pi / 180.0;
      for (int k = 0; k < kSamples; ++k) {
        const double t = 2.0 * std::numbers::pi * k / kSamples;
        const double u = e->semi_x * std::cos(t);
        const double v = e->semi_y * std::sin(t);
        r = std::max(r, std::hypot(e->center.x + u * std::cos(rot) - v * std::sin(rot),
                                   e->center.y + u * std::sin(rot) + v * std::cos(rot)));
      }
      continue;
    }
    const RoiMm b = bounding_box(p);
    for (double x : {b.xmin, b.xmax}) {
      for (double y : {b.ymin, b.ymax}) r = std::max(r, std::hypot(x, y));
    }
  }
  return r;
}

ImageGrid rasterize(const PhantomSpec& spec, std::size_t width, std::size_t height,
                    double pixel_size) {
  spec.validate();
  ImageGrid img(width, height, pixel_size);
  const double air = hu_to_mu(-1000.0);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const Point2 c = img.pixel_center(x, y);
      double value = air;
      for (const auto& prim : spec.primitives) {
        std::visit(
            [&](const auto& p) {
              if (contains(p, c)) value = hu_to_mu(p.value_hu);
            },
            prim);
      }
      img.at(x, y) = value;
    }
  }
  return img;
}

void append_bar_stack(PhantomSpec& spec, double center_x, double y_start, double value_hu,
                      const BarPatternLayout& layout) {
  double y = y_start;
  for (double w : layout.widths) {
    for (int b = 0; b < layout.bars_per_group; ++b) {
      spec.primitives.push_back(Bar{{center_x, y + 0.5 * w}, layout.bar_length, w, value_hu});
      y += 2.0 * w;
    }
    y += layout.group_gap - w;  // last bar is not followed by a bar-width gap
  }
}

PhantomSpec builtin_head_phantom() {
  // Dimensions fit inside the 94 mm disc covered by the default fan.
  constexpr double kBone = 800.0;
  constexpr double kBrain = 50.0;
  PhantomSpec spec;
  auto ellipse = [&](double cx, double cy, double a, double b, double rot, double hu) {
    spec.primitives.push_back(Ellipse{{cx, cy}, a, b, rot, hu});
  };

  ellipse(0.0, 0.0, 68.0, 86.0, 0.0, kBone);   // skull
  ellipse(0.0, 0.0, 63.0, 81.0, 0.0, kBrain);  // brain

  // Eyes: bony orbit rim, vitreous body, lens.
  for (double sx : {-1.0, 1.0}) {
    ellipse(sx * 30.0, 50.0, 15.0, 14.0, 0.0, kBone);
    ellipse(sx * 30.0, 50.0, 12.5, 11.5, 0.0, kBrain + 50.0);
    ellipse(sx * 30.0, 57.0, 5.0, 2.5, 0.0, kBrain + 100.0);
  }
  // Bony bridge between the orbits, the main source of long horizontal streaks.
  ellipse(0.0, 66.0, 8.0, 4.0, 0.0, kBone);

  // Ventricles and low-contrast inserts.
  ellipse(-9.0, 8.0, 4.0, 14.0, 20.0, kBrain - 25.0);
  ellipse(9.0, 8.0, 4.0, 14.0, -20.0, kBrain - 25.0);
  ellipse(0.0, -22.0, 12.0, 8.0, 0.0, kBrain + 50.0);
  ellipse(0.0, 27.0, 5.0, 5.0, 0.0, kBrain + 100.0);
  ellipse(-18.0, -52.0, 6.0, 6.0, 0.0, kBrain + 25.0);
  ellipse(18.0, -52.0, 6.0, 6.0, 0.0, kBrain + 50.0);
  ellipse(0.0, -62.0, 10.0, 5.0, 0.0, kBrain + 100.0);

  // Right ear: bony inner ear with a soft core.
  ellipse(52.0, -8.0, 6.0, 9.0, 0.0, kBone);
  ellipse(52.0, -8.0, 2.5, 4.0, 0.0, kBrain + 100.0);

  // Left ear replaced by high- and medium-contrast bar stacks.
  append_bar_stack(spec, -50.25, -28.0, 800.0);
  append_bar_stack(spec, -42.25, -28.0, 250.0);

  spec.roi = RoiMm{-15.0, 42.0, 15.0, 60.0};
  return spec;
}

PhantomSpec parse_phantom_spec(const std::string& text) {
  PhantomSpec spec;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("phantom spec line " + std::to_string(lineno) + ": " + why);
    };
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) fail("non-numeric field");
    if (kind == "ellipse") {
      if (v.size() != 6) fail("ellipse expects cx cy a b theta_deg value_hu");
      spec.primitives.push_back(Ellipse{{v[0], v[1]}, v[2], v[3], v[4], v[5]});
    } else if (kind == "bar") {
      if (v.size() != 5) fail("bar expects cx cy w h value_hu");
      spec.primitives.push_back(Bar{{v[0], v[1]}, v[2], v[3], v[4]});
    } else if (kind == "roi") {
      if (v.size() != 4) fail("roi expects xmin ymin xmax ymax");
      spec.roi = RoiMm{v[0], v[1], v[2], v[3]};
    } else {
      fail("unknown primitive '" + kind + "'");
    }
    PhantomSpec single;
    if (kind != "roi") single.primitives.push_back(spec.primitives.back());
    if (kind == "roi") single.roi = spec.roi;
    try {
      single.validate();
    } catch (const std::invalid_argument&) {
      fail("extents must be positive, min below max, and values finite");
    }
  }
  return spec;
}

PhantomSpec load_phantom_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read phantom spec: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_phantom_spec(ss.str());
}

std::string format_phantom_spec(const PhantomSpec& spec) {
  std::ostringstream out;
  out << "# kind  parameters (mm, degrees, HU)\n";
  for (const auto& prim : spec.primitives) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Ellipse>) {
            out << "ellipse " << num(p.center.x) << ' ' << num(p.center.y) << ' '
                << num(p.semi_x) << ' ' << num(p.semi_y) << ' ' << num(p.rotation_deg)
                << ' ' << num(p.value_hu) << '\n';
          } else {
            out << "bar " << num(p.center.x) << ' ' << num(p.center.y) << ' '
                << num(p.width) << ' ' << num(p.height) << ' ' << num(p.value_hu) << '\n';
          }
        },
        prim);
  }
  if (spec.roi) {
    out << "roi " << num(spec.roi->xmin) << ' ' << num(spec.roi->ymin) << ' '
        << num(spec.roi->xmax) << ' ' << num(spec.roi->ymax) << '\n';
  }
  return out.str();
}

}  // namespace latomo
