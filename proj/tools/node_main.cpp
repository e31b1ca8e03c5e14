#include "griddisc/config.hpp"
#include "griddisc/errors.hpp"
#include "griddisc/node.hpp"

#include <cstdio>
#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string help;
    griddisc::NodeConfig config;
    try {
        config = griddisc::parse_node_config(args, &help);
    } catch (const griddisc::Error& e) {
        std::fprintf(stderr, "griddisc-node: %s\n", e.what());
        return 2;
    }
    if (!help.empty()) {
        std::fputs(help.c_str(), stdout);
        return 0;
    }
    return griddisc::run_node(config);
}
