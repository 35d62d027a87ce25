#pragma once

#include <vector>

namespace wpcn {

// One candidate solution of the joint time/power allocation problem.
// The block time is normalized to 1, tau0 is the energy-harvest fraction,
// tau1 the transmit fraction, and t = 1/tau1 the reformulated time variable.
// tau0 is always constructed as 1 - tau1 so that tau0 + tau1 == 1 exactly.
struct Allocation {
    double tau0 = 0.0;
    double tau1 = 1.0;
    double t = 1.0;               // 1/tau1, >= 1
    std::vector<double> p;        // transmit powers, watts, >= 0
};

}  // namespace wpcn
