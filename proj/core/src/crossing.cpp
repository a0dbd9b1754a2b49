#include "synclab/crossing.hpp"

#include <cmath>

namespace synclab {
namespace {

constexpr double kTimeTol = 1e-10;

bool wanted(CrossingDirection filter, CrossingDirection found) {
  return filter == CrossingDirection::Both || filter == found;
}

}  // namespace

std::vector<Crossing> detect_crossing(const Trajectory& traj, const ScalarFn& g,
                                      CrossingDirection direction) {
  std::vector<Crossing> out;
  const auto& times = traj.times();
  const auto& states = traj.states();
  if (times.size() < 2) return out;

  double g_prev = g(times[0], states[0]);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double g_next = g(times[k + 1], states[k + 1]);
    const bool up = g_prev < 0.0 && g_next >= 0.0;
    const bool down = g_prev > 0.0 && g_next <= 0.0;
    if (up || down) {
      const auto dir = up ? CrossingDirection::Up : CrossingDirection::Down;
      if (wanted(direction, dir)) {
        double lo = times[k];
        double hi = times[k + 1];
        double g_lo = g_prev;
        double g_hi = g_next;
        while (hi - lo > kTimeTol && g_hi != 0.0) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const double g_mid = g(mid, traj.at(mid));
          if ((g_mid < 0.0) == (g_lo < 0.0) && g_mid != 0.0) {
            lo = mid;
            g_lo = g_mid;
          } else {
            hi = mid;
            g_hi = g_mid;
          }
        }
        const double t_root = std::abs(g_lo) < std::abs(g_hi) ? lo : hi;
        out.push_back({t_root, traj.at(t_root), dir});
      }
    }
    g_prev = g_next;
  }
  return out;
}

}  // namespace synclab
