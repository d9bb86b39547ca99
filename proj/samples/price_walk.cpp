// Reads a market file, solves for minimal prices, and shows how each price
// is recovered by walking the swap graph from a free good.
#include <fstream>
#include <iostream>
#include <sstream>

#include "walras/json_io.hpp"
#include "walras/walras.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: price_walk <market.json>\n";
    return 2;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "cannot open " << argv[1] << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    walras::Market market = walras::parse_market(buf.str());
    auto we = walras::minimal_walrasian(market);
    std::cout << "minimal prices " << we.prices.str() << ", welfare " << walras::to_string(we.welfare) << "\n";
    auto g = market.unit_demand() ? walras::build_unit(market, we.prices, we.allocation)
                                  : walras::build_gs(market, we.prices, we.allocation);
    for (walras::GoodId x = 0; x < market.num_goods(); ++x) {
      std::cout << "good " << x << ": ";
      auto path = walras::shortest_source_path(g, x);
      if (!path) {
        std::cout << "no source path (on a cycle)\n";
        continue;
      }
      std::cout << g.node_name(path->start);
      for (int e : path->edges) {
        std::cout << " -[buyer " << g.edges[e].buyer << ", " << walras::to_string(g.edges[e].delta) << "]-> "
                  << g.node_name(g.edges[e].to);
      }
      std::cout << "  sum " << walras::to_string(walras::reconstruct_price(g, *path)) << "\n";
    }
  } catch (const walras::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
