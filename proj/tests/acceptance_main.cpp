#include "kpist/acceptance.hpp"

#include <iostream>

int main() {
    auto results = kpist::run_acceptance(std::cout);
    int failures = 0;
    for (const auto& r : results)
        if (!r.pass) ++failures;
    if (failures > 0) {
        std::cout << failures << " criteria failed\n";
        return 1;
    }
    std::cout << "all " << results.size() << " criteria passed\n";
    return 0;
}
