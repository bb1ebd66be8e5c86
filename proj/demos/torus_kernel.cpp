// Searches a small box of operators for annihilators of the trefoil's
// colored Jones function and checks that G is among them.
#include <iostream>

#include "qtk/kernel.hpp"
#include "qtk/operators.hpp"

int main() {
  const qtk::TorusKnot K(2, 3);
  for (std::int64_t L_deg : {1, 2}) {
    qtk::KernelQuery q{K, L_deg, 12, -24, 6, 1, 50};
    const auto r = qtk::minimality_kernel(q);
    std::cout << "L-degree " << L_deg << ": dimension " << r.dimension << "\n";
    if (auto unit = qtk::contains_up_to_unit(r, q, qtk::build_G(3).element))
      std::cout << "  contains G after multiplying by " << unit->to_string() << "\n";
  }
}
