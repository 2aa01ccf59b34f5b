// Writes the sample symbol-spec documents shipped under data/.

#include <qlim/report.hpp>
#include <qlim/symbol_io.hpp>
#include <qlim/toeplitz.hpp>

#include <filesystem>
#include <iostream>

int main(int argc, char** argv)
{
    if (argc > 2 || (argc == 2 && argv[1][0] == '-')) {
        std::cerr << "usage: make_symbol_files [output-dir]\n";
        return 2;
    }
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
    try {
        std::filesystem::create_directories(dir);
        qlim::write_text_file(dir / "gapped_product.json", qlim::expr_to_json(qlim::gapped_product_family(4096)));
        qlim::write_text_file(dir / "laplacian.json", qlim::expr_to_json(qlim::MatrixExpr::single(qlim::laplacian_symbol())));
        qlim::write_text_file(dir / "shift_product.json",
                              qlim::expr_to_json(qlim::MatrixExpr({{qlim::shift_symbol(1), qlim::shift_symbol(-1)}})));
    } catch (const std::exception& e) {
        std::cerr << "make_symbol_files: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
