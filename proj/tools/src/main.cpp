#include "app.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    gsf::app::RunConfig config;
    try {
        config = gsf::app::parse_config(args);
    } catch (const gsf::app::UsageError& e) {
        if (e.help()) {
            std::cout << e.what();
            return 0;
        }
        std::cerr << "gsf: " << e.what() << "\nrun 'gsf --help' for usage\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "gsf: " << e.what() << '\n';
        return 1;
    }
    return gsf::app::execute(config, std::cout, std::cerr);
}
