#include "doctest.h"

#include <filesystem>

#include "helpers.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/fsio.hpp"

using namespace symlearn;

TEST_SUITE("fsio") {

TEST_CASE("round trip and overwrite") {
    test::TempDir tmp;
    std::string path = tmp.file("note.txt");
    atomic_write_text(path, "first\n");
    CHECK(read_text_file(path) == "first\n");
    atomic_write_text(path, "second\n");
    CHECK(read_text_file(path) == "second\n");
}

TEST_CASE("creates missing parent directories") {
    test::TempDir tmp;
    std::string path = tmp.file("a/b/c.txt");
    atomic_write_text(path, "deep");
    CHECK(read_text_file(path) == "deep");
}

TEST_CASE("no temp litter remains after a write") {
    test::TempDir tmp;
    atomic_write_text(tmp.file("x.txt"), "data");
    std::size_t entries = 0;
    for ([[maybe_unused]] auto& e : std::filesystem::directory_iterator(tmp.path()))
        ++entries;
    CHECK(entries == 1);
}

TEST_CASE("reading a missing file throws IoError") {
    test::TempDir tmp;
    CHECK_THROWS_AS(read_text_file(tmp.file("absent.txt")), IoError);
}

TEST_CASE("binary-safe content") {
    test::TempDir tmp;
    std::string blob("\x00\x01\xff\n\x00", 5);
    std::string path = tmp.file("blob.bin");
    atomic_write_text(path, blob);
    CHECK(read_text_file(path) == blob);
}

}  // TEST_SUITE
