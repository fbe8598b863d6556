// Deterministic stand-in for an optimizing compiler pass. Reads a source
// file and reports "fusion opportunities": pairs of adjacent loops (a loop
// closing brace immediately followed by another loop keyword).
//
// Modes:
//   fake_pass fusion <input>          print "fused: N" when N >= 1; exits
//                                     nonzero with an assertion message when
//                                     the input contains the planted token
//                                     "__planted_assert"
//   fake_pass crash-adjacent <input>  abort with an assertion message when
//                                     the input has adjacent loops
//   fake_pass sleep <input>           hang (for timeout tests)

#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

static int count_adjacent_loops(const std::string& text) {
    int n = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '}') continue;
        size_t j = i + 1;
        while (j < text.size() && isspace((unsigned char)text[j])) ++j;
        auto kw = [&](const char* w) {
            size_t len = strlen(w);
            if (text.compare(j, len, w) != 0) return false;
            char next = j + len < text.size() ? text[j + len] : ' ';
            return !(isalnum((unsigned char)next) || next == '_');
        };
        if (kw("for") || kw("while") || kw("do") || kw("scf.for")) ++n;
    }
    return n;
}

int main(int argc, char** argv) {
    if (argc < 3) {
        fprintf(stderr, "usage: fake_pass <mode> <input>\n");
        return 64;
    }
    std::string mode = argv[1];
    std::ifstream f(argv[2], std::ios::binary);
    if (!f) {
        fprintf(stderr, "fake_pass: cannot open %s\n", argv[2]);
        return 66;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    std::string text = ss.str();

    if (mode == "sleep") {
        sleep(600);
        return 0;
    }

    int n = count_adjacent_loops(text);
    if (mode == "fusion") {
        if (text.find("__planted_assert") != std::string::npos) {
            fprintf(stderr,
                    "fake_pass: FusionLegality.cpp:217: void fuse(Loop&): "
                    "Assertion `preheader != nullptr' failed.\n");
            return 1;
        }
        if (n >= 1) printf("fused: %d\n", n);
        return 0;
    }
    if (mode == "crash-adjacent") {
        if (n >= 1) {
            fprintf(stderr,
                    "fake_pass: FusionLegality.cpp:217: void fuse(Loop&): "
                    "Assertion `preheader != nullptr' failed.\n");
            abort();
        }
        return 0;
    }
    fprintf(stderr, "fake_pass: unknown mode %s\n", mode.c_str());
    return 64;
}
