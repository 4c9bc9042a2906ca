#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mimic/core/checkpoint.hpp"
#include "mimic/core/rng.hpp"
#include "test_util.hpp"

using namespace mimic::core;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    auto dir = fs::temp_directory_path() / "mimic_ckpt_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("checkpoint round-trip is bitwise exact") {
    Rng rng(7);
    std::vector<NamedTensor> ts;
    ts.push_back({"enc1.weight", testutil::random_tensor({4, 3, 3, 3}, rng)});
    ts.push_back({"enc1.bias", testutil::random_tensor({4}, rng)});
    ts.push_back({"head.weight", testutil::random_tensor({12, 5}, rng)});

    auto path = temp_file("roundtrip.mimw");
    save_checkpoint(path.string(), ts);
    auto back = load_checkpoint(path.string());

    REQUIRE(back.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(back[i].name == ts[i].name);
        CHECK(back[i].tensor.shape() == ts[i].tensor.shape());
        auto a = ts[i].tensor.data();
        auto b = back[i].tensor.data();
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
    }

    // two saves of the same tensors are byte-identical
    auto path2 = temp_file("roundtrip2.mimw");
    save_checkpoint(path2.string(), ts);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), {});
    std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
}

TEST_CASE("checkpoint corrupt magic rejected with file name") {
    auto path = temp_file("badmagic.mimw");
    std::ofstream os(path, std::ios::binary);
    os.write("NOPE\x01\x00\x00\x00", 8);
    os.close();
    try {
        load_checkpoint(path.string());
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("badmagic.mimw") != std::string::npos);
        CHECK(std::string(e.what()).find("magic") != std::string::npos);
    }
}

TEST_CASE("checkpoint truncation rejected") {
    Rng rng(9);
    std::vector<NamedTensor> ts;
    ts.push_back({"w", testutil::random_tensor({8, 8}, rng)});
    auto path = temp_file("trunc.mimw");
    save_checkpoint(path.string(), ts);

    auto full = fs::file_size(path);
    fs::resize_file(path, full - 17);
    CHECK_THROWS_AS(load_checkpoint(path.string()), IoError);
}

TEST_CASE("restore_parameters matches by name and shape") {
    Rng rng(11);
    std::vector<NamedTensor> saved;
    saved.push_back({"w", testutil::random_tensor({2, 2}, rng)});
    auto path = temp_file("restore.mimw");
    save_checkpoint(path.string(), saved);
    auto loaded = load_checkpoint(path.string());

    std::vector<NamedTensor> params;
    params.push_back({"w", Tensor::zeros({2, 2})});
    restore_parameters(loaded, params, path.string());
    CHECK(params[0].tensor.data()[3] == saved[0].tensor.data()[3]);

    std::vector<NamedTensor> wrong;
    wrong.push_back({"w", Tensor::zeros({3, 2})});
    CHECK_THROWS_AS(restore_parameters(loaded, wrong, path.string()), IoError);
    std::vector<NamedTensor> missing;
    missing.push_back({"nope", Tensor::zeros({2, 2})});
    CHECK_THROWS_AS(restore_parameters(loaded, missing, path.string()), IoError);
}
