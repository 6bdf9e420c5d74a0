#include <iostream>

#include "pim/core/config.hpp"
#include "pim/experiment/acceptance.hpp"

int main() {
    const auto result = pim::exp::run_acceptance(pim::SystemConfig{});
    std::cout << pim::exp::format_report(result, true);
    return pim::exp::all_pass(result) ? 0 : 1;
}
