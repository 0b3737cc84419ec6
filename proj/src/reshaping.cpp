#include "faceforge/reshaping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "faceforge/error.hpp"

namespace faceforge {

RegionMap::RegionMap(int width, int height, Region fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw Error(ErrorKind::geometry, "region map dimensions must be positive");
  labels_.assign(static_cast<std::size_t>(width) * height, fill);
}

std::array<std::size_t, 4> RegionMap::counts() const {
  std::array<std::size_t, 4> n{};
  for (Region r : labels_) ++n[static_cast<std::size_t>(r)];
  return n;
}

RegionMap compute_region_map(const Mask& m_face, const Mask& r_face) {
  require_same_dims(m_face, r_face, "region map masks");
  RegionMap map(m_face.width(), m_face.height());
  for (int y = 0; y < m_face.height(); ++y) {
    for (int x = 0; x < m_face.width(); ++x) {
      const bool m = m_face.at(x, y), r = r_face.at(x, y);
      map.set(x, y, m ? (r ? Region::yellow : Region::blue) : (r ? Region::green : Region::gray));
    }
  }
  return map;
}

Image render_region_map(const RegionMap& map) {
  static constexpr std::array<std::array<float, 3>, 4> kPalette = {{
      {128.0f / 255.0f, 128.0f / 255.0f, 128.0f / 255.0f},
      {1.0f, 1.0f, 0.0f},
      {0.0f, 1.0f, 0.0f},
      {0.0f, 0.0f, 1.0f},
  }};
  Image out(map.width(), map.height(), 3);
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      const auto& rgb = kPalette[static_cast<std::size_t>(map.at(x, y))];
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = rgb[c];
    }
  return out;
}

void validate(const InpaintConfig& cfg) {
  if (cfg.max_iterations < 1) throw Error(ErrorKind::contract, "inpaint max_iterations must be >= 1");
  if (!(cfg.residual_tolerance > 0.0)) throw Error(ErrorKind::contract, "inpaint tolerance must be > 0");
}

namespace {

constexpr int kNoNode = -1;

// One unknown of the Laplace system.
struct Node {
  int pixel = 0;          // y * width + x
  int neighbours = 0;     // in-raster 4-neighbours
  std::array<int, 4> blue{kNoNode, kNoNode, kNoNode, kNoNode};
  std::array<double, 3> fixed_sum{};  // sum of Dirichlet neighbours per channel
  int component = 0;
};

}  // namespace

ReshapeResult reshape_inpaint(const Image& blended, const RegionMap& region_map, const InpaintConfig& cfg) {
  validate(cfg);
  require_pipeline_image(blended, "blended image");
  if (blended.width() != region_map.width() || blended.height() != region_map.height()) {
    throw Error(ErrorKind::geometry, "region map does not match blended image dimensions");
  }

  const int w = blended.width(), h = blended.height();
  ReshapeResult result{blended, {}};

  std::vector<int> node_of(static_cast<std::size_t>(w) * h, kNoNode);
  std::vector<Node> nodes;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (region_map.at(x, y) == Region::blue) {
        node_of[static_cast<std::size_t>(y) * w + x] = static_cast<int>(nodes.size());
        nodes.push_back(Node{y * w + x});
      }
  result.report.filled_pixels = nodes.size();
  if (nodes.empty()) return result;

  constexpr std::array<std::array<int, 2>, 4> kSteps = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  for (Node& n : nodes) {
    const int x = n.pixel % w, y = n.pixel / w;
    int slot = 0;
    for (auto [dx, dy] : kSteps) {
      const int nx = x + dx, ny = y + dy;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      ++n.neighbours;
      const int other = node_of[static_cast<std::size_t>(ny) * w + nx];
      if (other != kNoNode) {
        n.blue[slot++] = other;
      } else {
        for (int c = 0; c < 3; ++c) n.fixed_sum[c] += blended.at(nx, ny, c);
      }
    }
  }

  // Label 4-connected components and seed each with the mean of its
  // boundary values; a component without boundary values cannot be filled.
  std::vector<int> component(nodes.size(), -1);
  std::vector<std::array<double, 3>> seed;
  std::vector<int> stack;
  for (std::size_t start = 0; start < nodes.size(); ++start) {
    if (component[start] >= 0) continue;
    const int id = static_cast<int>(seed.size());
    std::array<double, 3> sum{};
    double incidences = 0.0;
    stack.assign(1, static_cast<int>(start));
    component[start] = id;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const Node& n = nodes[static_cast<std::size_t>(i)];
      int blue_count = 0;
      for (int b : n.blue) {
        if (b == kNoNode) continue;
        ++blue_count;
        if (component[static_cast<std::size_t>(b)] < 0) {
          component[static_cast<std::size_t>(b)] = id;
          stack.push_back(b);
        }
      }
      incidences += n.neighbours - blue_count;
      for (int c = 0; c < 3; ++c) sum[c] += n.fixed_sum[c];
    }
    if (incidences == 0.0) {
      const Node& n = nodes[start];
      throw Error(ErrorKind::unfillable, "BLUE component containing pixel (" + std::to_string(n.pixel % w) +
                                             "," + std::to_string(n.pixel / w) +
                                             ") has no non-BLUE boundary pixels");
    }
    seed.push_back({sum[0] / incidences, sum[1] / incidences, sum[2] / incidences});
  }

  std::vector<double> value(nodes.size() * 3);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (int c = 0; c < 3; ++c) value[i * 3 + c] = seed[static_cast<std::size_t>(component[i])][c];

  std::array<std::vector<int>, 2> colour;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int p = nodes[i].pixel;
    colour[static_cast<std::size_t>((p % w + p / w) % 2)].push_back(static_cast<int>(i));
  }

  auto relaxed = [&](const Node& n, int c) {
    double acc = n.fixed_sum[c];
    for (int b : n.blue)
      if (b != kNoNode) acc += value[static_cast<std::size_t>(b) * 3 + c];
    return acc / n.neighbours;
  };

  auto& report = result.report;
  report.residual_history.reserve(static_cast<std::size_t>(std::min(cfg.max_iterations, 4096)));
  report.converged = false;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    for (const auto& pass : colour)
      for (int i : pass)
        for (int c = 0; c < 3; ++c)
          value[static_cast<std::size_t>(i) * 3 + c] = relaxed(nodes[static_cast<std::size_t>(i)], c);

    double residual = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (int c = 0; c < 3; ++c)
        residual = std::max(residual, std::abs(relaxed(nodes[i], static_cast<int>(c)) - value[i * 3 + c]));

    report.iterations = iter + 1;
    report.final_residual = residual;
    report.residual_history.push_back(residual);
    if (residual <= cfg.residual_tolerance) {
      report.converged = true;
      break;
    }
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int p = nodes[i].pixel;
    for (int c = 0; c < 3; ++c) result.image.at(p % w, p / w, c) = static_cast<float>(value[i * 3 + c]);
  }
  return result;
}

}  // namespace faceforge
