// Colored Jones polynomials of the trefoil and the operator G that
// annihilates them.
#include <iostream>

#include "qtk/classical.hpp"
#include "qtk/jones.hpp"
#include "qtk/operators.hpp"

int main() {
  const qtk::TorusKnot K(2, 3);
  for (int n = 1; n <= 4; ++n) std::cout << "J(" << n << ") = " << qtk::colored_jones(K, n).to_string() << "\n";

  const auto G = qtk::build_G(3);
  std::cout << "G = " << G.element.to_string() << "\n";
  const auto J = qtk::jones_sequence(K);
  for (int n = 1; n <= 4; ++n) std::cout << "(G J)(" << n << ") = " << qtk::apply(G.element, J, n).to_string() << "\n";

  std::cout << "epsilon(G) = " << qtk::epsilon(G.element).to_string() << "\n";
  std::cout << "A-polynomial = " << qtk::a_polynomial(K).element.to_string() << "\n";
}
