#include "mfp/database.hpp"
#include "mfp/error.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace mfp;

namespace {

ExperimentDescriptor short_protocol()
{
    auto d = default_descriptor();
    d.n_t = 3;
    d.u_max = 3 * 0.85;
    return d;
}

std::vector<SweepPoint> sample_points()
{
    const auto all = standard_sweep();
    std::vector<SweepPoint> out;
    for (std::size_t i = 0; i < all.size(); i += 90) {
        out.push_back(all[i]);
    }
    return out;
}

const Database& small_database()
{
    static const Database db = [] {
        GenerationOptions opts;
        opts.edge_length = 10.0;
        return generate(short_protocol(), sample_points(), opts);
    }();
    return db;
}

} // namespace

TEST(Grid, EndpointsAndSpacing)
{
    const auto g = parameter_grid(0.1, 10.0, 10);
    ASSERT_EQ(g.size(), 10u);
    EXPECT_EQ(g.front(), 0.1);
    EXPECT_EQ(g.back(), 10.0);
    EXPECT_NEAR(g[1] - g[0], 1.1, 1e-12);
    EXPECT_EQ(parameter_grid(2.0, 2.0, 1), std::vector<double>{2.0});
    EXPECT_THROW(parameter_grid(1.0, 10.0, 0), ArgumentError);
    EXPECT_THROW(parameter_grid(10.0, 1.0, 5), ArgumentError);
}

TEST(Grid, PublishedDiscoveredValuesAreNodes)
{
    const auto ogden = parameter_grid(1.0, 10.0, 100);
    const auto lp = parameter_grid(0.01, 10.0, 100);
    const auto gnh2 = parameter_grid(0.01, 10.0, 20);
    const auto gnh3 = parameter_grid(0.5, 10.0, 20);
    EXPECT_NEAR(ogden[18], 2.6364, 5e-5);
    EXPECT_NEAR(ogden[30], 3.7273, 5e-5);
    EXPECT_NEAR(ogden[19], 2.7273, 5e-5);
    EXPECT_NEAR(ogden[99], 10.0, 5e-5);
    EXPECT_NEAR(lp[7], 0.7164, 5e-5);
    EXPECT_NEAR(gnh2[6], 3.1647, 5e-5);
    EXPECT_NEAR(gnh2[0], 0.01, 5e-5);
    EXPECT_NEAR(gnh3[0], 0.5, 5e-5);
}

TEST(Sweep, CardinalityAndOrder)
{
    const auto sweep = standard_sweep();
    ASSERT_EQ(sweep.size(), 901u);
    std::map<ModelId, int> counts;
    for (const auto& p : sweep) {
        ++counts[p.model];
        check_signature(p.model, p.params);
        for (const double t : p.params.theta) {
            EXPECT_GT(t, 0.0);
        }
        EXPECT_EQ(p.params.theta.front(), 1.0);
    }
    EXPECT_EQ(counts[ModelId::Carroll], 100);
    EXPECT_EQ(counts[ModelId::LopezPamies], 100);
    EXPECT_EQ(counts[ModelId::MooneyRivlin], 100);
    EXPECT_EQ(counts[ModelId::NeoHookean], 1);
    EXPECT_EQ(counts[ModelId::GenNeoHookean], 400);
    EXPECT_EQ(counts[ModelId::Ogden], 100);
    EXPECT_EQ(counts[ModelId::Yeoh], 100);
    EXPECT_EQ(sweep[0].model, ModelId::Carroll);
    EXPECT_EQ(sweep[0].params.theta, (std::vector<double>{1.0, 0.1, 0.1}));
    EXPECT_EQ(sweep[1].params.theta, (std::vector<double>{1.0, 0.1, 1.2}));
    EXPECT_EQ(sweep[300].model, ModelId::NeoHookean);
    EXPECT_EQ(sweep[301].params.alpha, (std::vector<double>{0.01, 0.5}));
    EXPECT_EQ(sweep[302].params.alpha[0], 0.01);
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        EXPECT_LE(static_cast<int>(sweep[i - 1].model), static_cast<int>(sweep[i].model));
    }
}

TEST(Sweep, RestrictedToModels)
{
    const std::vector<ModelId> nh{ModelId::NeoHookean};
    EXPECT_EQ(sweep_for(nh).size(), 1u);
    const std::vector<ModelId> two{ModelId::Yeoh, ModelId::Ogden};
    const auto s = sweep_for(two);
    ASSERT_EQ(s.size(), 200u);
    EXPECT_EQ(s.front().model, ModelId::Ogden);
}

TEST(Generate, NeoHookeanOnlyConvergesEverywhere)
{
    GenerationOptions opts;
    opts.edge_length = 6.0;
    const std::vector<ModelId> nh{ModelId::NeoHookean};
    std::vector<GenerationRecord> report;
    const Database db = generate(default_descriptor(), sweep_for(nh), opts, &report);
    ASSERT_EQ(db.size(), 1u);
    EXPECT_EQ(db.entries[0].last_converged_step, 35);
    EXPECT_EQ(db.entries[0].fingerprint.valid_steps, 35);
    EXPECT_EQ(db.entries[0].fingerprint.descriptor_hash, db.descriptor_hash());
    ASSERT_EQ(report.size(), 1u);
    EXPECT_EQ(report[0].valid_steps, 35);
}

TEST(Generate, IndependentOfJobCount)
{
    GenerationOptions opts;
    opts.edge_length = 10.0;
    opts.jobs = 3;
    const Database parallel = generate(short_protocol(), sample_points(), opts);
    EXPECT_EQ(serialize(parallel), serialize(small_database()));
}

TEST(Persistence, SaveLoadRoundTrip)
{
    const Database& db = small_database();
    const auto dir = test::scratch_dir("db_roundtrip");
    const std::string path = (dir / "db.mfp").string();
    save(db, path);
    const Database back = load(path);
    EXPECT_EQ(back, db);
    EXPECT_EQ(serialize(back), serialize(db));
    const auto desc = short_protocol();
    EXPECT_NO_THROW(load(path, &desc));
}

TEST(Persistence, ForeignProtocolIsRejected)
{
    const std::string text = serialize(small_database());
    const auto other = default_descriptor();
    EXPECT_THROW(parse_database(text, &other), ProtocolMismatchError);
}

TEST(Persistence, TruncatedFileNamesByteOffset)
{
    const std::string text = serialize(small_database());
    const std::size_t cut = text.rfind('\n', text.size() - 2) + 1;
    try {
        parse_database(std::string_view(text).substr(0, cut));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("byte offset " + std::to_string(cut)), std::string::npos) << what;
        EXPECT_NE(what.find("file ends after"), std::string::npos) << what;
    }
}

TEST(Persistence, CorruptRecords)
{
    const std::string text = serialize(small_database());
    const std::size_t last = text.rfind('\n', text.size() - 2) + 1;
    std::string bad_token = text;
    bad_token.replace(last, bad_token.find(' ', last) - last, "hookean");
    EXPECT_THROW(parse_database(bad_token), ParseError);
    std::string short_record = text.substr(0, text.size() - 1);
    short_record = short_record.substr(0, short_record.rfind(' ')) + "\n";
    EXPECT_THROW(parse_database(short_record), ParseError);
    EXPECT_THROW(parse_database(text + "extra\n"), ParseError);
    EXPECT_THROW(parse_database("format_version = 7\n"), ParseError);
}

TEST(Persistence, GenerationReportColumns)
{
    std::vector<GenerationRecord> report{{3, ModelId::Ogden, {2.0}, {1.0}, 35, 0.5}};
    std::ostringstream out;
    write_generation_report(out, report);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "index,model,alpha,theta,valid_steps,wall_seconds");
    EXPECT_NE(text.find("3,ogden,2.00000000e+00,1.00000000e+00,35,"), std::string::npos);
}

TEST(Persistence, ListFormatting)
{
    EXPECT_EQ(format_list(std::vector<double>{}), "-");
    EXPECT_EQ(format_list(std::vector<double>{1.0, 0.5}), "1.00000000e+00 5.00000000e-01");
}
