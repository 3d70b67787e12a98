#pragma once

#include <string>
#include <vector>

namespace safelight::sim {

enum class Indication { protected_green, permitted_green, yellow, red };
enum class Interval { green, yellow, all_red };

const char* to_string(Indication i);
const char* to_string(Interval i);

// What the simulator sees of the controller for one tick: one indication per
// movement plus the interval kind of the active signal state.
struct SignalView {
  std::vector<Indication> indications;
  Interval interval = Interval::green;

  static SignalView all(std::size_t movements, Indication ind, Interval interval = Interval::green) {
    return SignalView{std::vector<Indication>(movements, ind), interval};
  }
};

}  // namespace safelight::sim
