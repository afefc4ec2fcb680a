#include <gtest/gtest.h>

#include <alphamod/io.hpp>
#include <alphamod/test_signals.hpp>

#include <filesystem>

using namespace alphamod;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "alphamod_io_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Csv, QuotesAndRoundTripNumbers) {
    io::CsvWriter w({"a", "b"});
    w.row({"x,y", io::fmt(0.1)});
    w.row({"q\"t", io::fmt(1.0 / 3.0)});
    EXPECT_EQ(w.str(), "a,b\n\"x,y\",0.1\n\"q\"\"t\",0.3333333333333333\n");
    EXPECT_THROW(w.row({"only one"}), std::invalid_argument);
    EXPECT_EQ(io::fmt(HUGE_VAL), "inf");
}

TEST(CoveringJson, RoundTrip) {
    for (const Covering& C : {build_ball_covering(2, 0.5, std::nullopt, 20.0), build_dyadic_covering(1, 100.0),
                              build_metric_covering(1, 0.5, 0.5, 50.0)}) {
        auto j = io::to_json(C);
        Covering D = io::covering_from_json(io::json::parse(j.dump()));
        EXPECT_EQ(io::to_json(D).dump(), j.dump());
        ASSERT_EQ(D.size(), C.size());
        for (std::size_t i = 0; i < C.size(); ++i) {
            EXPECT_EQ(D.patches[i].center, C.patches[i].center);
            EXPECT_EQ(D.patches[i].radius, C.patches[i].radius);
            EXPECT_EQ(D.patches[i].shape, C.patches[i].shape);
        }
    }
}

TEST(BapuJson, RebuildsIdenticalWindows) {
    GridSpec g{1, 1 << 14, 32};
    Bapu base = build_bapu(build_dyadic_covering(1, 500.0), g);
    Bapu B = adjoin_plateau(base, {{100.0, 0}, {-250.0, 0}}, 0.2);
    Bapu R = io::bapu_from_json(io::json::parse(io::dump(io::bapu_to_json(B))));
    ASSERT_EQ(R.size(), B.size());
    EXPECT_EQ(R.plateau_ids, B.plateau_ids);
    for (std::size_t i = 0; i < B.size(); ++i) EXPECT_EQ(R.windows[i].samples.values, B.windows[i].samples.values);
}

TEST(SignalFile, BinaryRoundTripIsExact) {
    GridSpec g{2, 64, 8};
    Signal f = make_test_signal(SignalKind::RandomBandlimited, g, 3, {}, {}, {20.0, 1.0, 0.3});
    auto base = scratch("sig");
    io::write_signal(base, f, {"random_bandlimited", 3, "spatial"});
    io::SignalMeta meta;
    Signal h = io::read_signal(base, &meta);
    EXPECT_EQ(h.grid, g);
    EXPECT_EQ(h.samples, f.samples);
    EXPECT_EQ(meta.kind, "random_bandlimited");
    EXPECT_EQ(meta.seed, 3u);
    auto side = io::json::parse(io::read_text(base.string() + ".json"));
    EXPECT_EQ(side["byte_order"], "little");
    EXPECT_EQ(std::filesystem::file_size(base.string() + ".bin"), g.total() * 16);
}

TEST(SignalFile, LittleEndianLayout) {
    std::ostringstream os;
    io::write_f64_le(os, {cplx(1.0, -2.0)});
    std::string b = os.str();
    ASSERT_EQ(b.size(), 16u);
    // 1.0 = 0x3FF0000000000000, least significant byte first.
    EXPECT_EQ(static_cast<unsigned char>(b[7]), 0x3F);
    EXPECT_EQ(static_cast<unsigned char>(b[6]), 0xF0);
    EXPECT_EQ(static_cast<unsigned char>(b[15]), 0xC0);
    std::istringstream is(b);
    EXPECT_EQ(io::read_f64_le(is, 1)[0], cplx(1.0, -2.0));
}
