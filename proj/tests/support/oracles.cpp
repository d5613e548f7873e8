#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace vipr::oracle {

double lanczos3(double x) {
  if (x == 0.0) return 1.0;
  if (std::fabs(x) >= 3.0) return 0.0;
  const double px = std::numbers::pi * x;
  return 3.0 * std::sin(px) * std::sin(px / 3.0) / (px * px);
}

GrayImage resize_direct(const GrayImage& img, int out_w, int out_h) {
  GrayImage out(out_w, out_h);
  const double sx = double(img.width()) / out_w, sy = double(img.height()) / out_h;
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      const double cx = (ox + 0.5) * sx - 0.5, cy = (oy + 0.5) * sy - 0.5;
      double num = 0, den = 0;
      for (int j = int(std::floor(cy)) - 3; j <= int(std::floor(cy)) + 4; ++j) {
        for (int i = int(std::floor(cx)) - 3; i <= int(std::floor(cx)) + 4; ++i) {
          const double w = lanczos3(i - cx) * lanczos3(j - cy);
          if (w == 0.0) continue;
          num += w * img.at(std::clamp(i, 0, img.width() - 1), std::clamp(j, 0, img.height() - 1));
          den += w;
        }
      }
      out.at(ox, oy) = std::clamp(num / den, 0.0, 1.0);
    }
  }
  return out;
}

Tensor<double> conv2d_direct(const Tensor<double>& input, const Tensor<double>& weight, const Tensor<double>& bias) {
  const std::size_t N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3), O = weight.dim(0);
  Tensor<double> out({N, O, H, W});
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t o = 0; o < O; ++o)
      for (std::size_t y = 0; y < H; ++y)
        for (std::size_t x = 0; x < W; ++x) {
          double acc = bias[o];
          for (std::size_t c = 0; c < C; ++c)
            for (int ky = -1; ky <= 1; ++ky)
              for (int kx = -1; kx <= 1; ++kx) {
                const long sy = long(y) + ky, sx = long(x) + kx;
                if (sy < 0 || sx < 0 || sy >= long(H) || sx >= long(W)) continue;
                acc += input[((n * C + c) * H + std::size_t(sy)) * W + std::size_t(sx)] *
                       weight[((o * C + c) * 3 + std::size_t(ky + 1)) * 3 + std::size_t(kx + 1)];
              }
          out[((n * O + o) * H + y) * W + x] = acc;
        }
  return out;
}

std::vector<double> numeric_gradient(const std::function<double()>& f, std::vector<double*> params, double eps) {
  std::vector<double> g;
  for (double* p : params) {
    const double saved = *p;
    *p = saved + eps;
    const double up = f();
    *p = saved - eps;
    const double down = f();
    *p = saved;
    g.push_back((up - down) / (2 * eps));
  }
  return g;
}

double relative_error(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-6}); }

double iou_area(const BBox& a, const BBox& b) {
  const double ax0 = a.cx - a.w / 2, ax1 = a.cx + a.w / 2, ay0 = a.cy - a.h / 2, ay1 = a.cy + a.h / 2;
  const double bx0 = b.cx - b.w / 2, bx1 = b.cx + b.w / 2, by0 = b.cy - b.h / 2, by1 = b.cy + b.h / 2;
  const double ow = std::max(0.0, std::min(ax1, bx1) - std::max(ax0, bx0));
  const double oh = std::max(0.0, std::min(ay1, by1) - std::max(ay0, by0));
  const double inter = ow * oh;
  if (inter == 0.0) return 0.0;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

double ciou_by_hand(const BBox& a, const BBox& b) {
  const double i = iou_area(a, b);
  const double rho2 = (a.cx - b.cx) * (a.cx - b.cx) + (a.cy - b.cy) * (a.cy - b.cy);
  const double left = std::min(a.cx - a.w / 2, b.cx - b.w / 2), right = std::max(a.cx + a.w / 2, b.cx + b.w / 2);
  const double top = std::min(a.cy - a.h / 2, b.cy - b.h / 2), bottom = std::max(a.cy + a.h / 2, b.cy + b.h / 2);
  const double c2 = (right - left) * (right - left) + (bottom - top) * (bottom - top);
  const double diff = std::atan(a.w / a.h) - std::atan(b.w / b.h);
  const double v = 4.0 / (std::numbers::pi * std::numbers::pi) * diff * diff;
  const double alpha = v == 0.0 ? 0.0 : v / ((1.0 - i) + v);
  return i - rho2 / c2 - alpha * v;
}

namespace {

void enumerate(const std::vector<std::size_t>& order, std::size_t pos, const std::vector<Detection>& dets,
               const std::vector<BBox>& gts, double thr, std::vector<int>& current, std::vector<bool>& used,
               std::vector<std::pair<double, int>>& key, std::vector<std::pair<double, int>>& best_key,
               std::vector<int>& best) {
  if (pos == order.size()) {
    if (best.empty() || key > best_key) {
      best_key = key;
      best = current;
    }
    return;
  }
  const std::size_t d = order[pos];
  key.push_back({-1.0, 0});
  current[d] = -1;
  enumerate(order, pos + 1, dets, gts, thr, current, used, key, best_key, best);
  key.pop_back();
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (used[g]) continue;
    const double v = iou_area(dets[d].box, gts[g]);
    if (v < thr) continue;
    used[g] = true;
    current[d] = int(g);
    key.push_back({v, -int(g)});
    enumerate(order, pos + 1, dets, gts, thr, current, used, key, best_key, best);
    key.pop_back();
    used[g] = false;
    current[d] = -1;
  }
}

}  // namespace

std::vector<int> match_exhaustive(const std::vector<Detection>& dets, const std::vector<BBox>& gts, double thr) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });
  std::vector<int> current(dets.size(), -1), best;
  std::vector<bool> used(gts.size(), false);
  std::vector<std::pair<double, int>> key, best_key;
  enumerate(order, 0, dets, gts, thr, current, used, key, best_key, best);
  return best.empty() ? std::vector<int>(dets.size(), -1) : best;
}

double ap_exhaustive(const std::vector<std::vector<Detection>>& dets, const std::vector<std::vector<BBox>>& gts,
                     double thr) {
  struct Item {
    double conf;
    bool tp;
  };
  std::vector<Item> items;
  std::size_t n_gt = 0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    n_gt += gts[i].size();
    const auto m = match_exhaustive(dets[i], gts[i], thr);
    for (std::size_t d = 0; d < dets[i].size(); ++d) items.push_back({dets[i][d].confidence, m[d] >= 0});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.conf > b.conf; });
  std::vector<double> prec, rec;
  for (std::size_t k = 1; k <= items.size(); ++k) {
    std::size_t tp = 0;
    for (std::size_t j = 0; j < k; ++j) tp += items[j].tp;
    prec.push_back(double(tp) / double(k));
    rec.push_back(double(tp) / double(n_gt));
  }
  double sum = 0;
  for (int step = 0; step <= 100; ++step) {
    const double r = step / 100.0;
    double best = 0;
    for (std::size_t k = 0; k < prec.size(); ++k) {
      if (rec[k] >= r) best = std::max(best, prec[k]);
    }
    sum += best;
  }
  return sum / 101.0;
}

}  // namespace vipr::oracle
