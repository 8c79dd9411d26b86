#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(ATCNN_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    RunResult res;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) res.output += buf;
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "atcnn_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kTinyTrain = " --channels 2 --epochs 3 --patience 3 --lr 0.003";

TEST(Cli, FullPipeline) {
    const auto dir = fresh_dir("pipeline");
    const auto raw = (dir / "raw").string();
    const auto prep = (dir / "prep").string();
    const auto models = (dir / "models").string();

    auto r = run_cli("synth --out " + raw + " --count 70 --samples 100 --seed 3");
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(dir / "raw" / "manifest.json"));
    EXPECT_TRUE(fs::exists(dir / "raw" / "injections.json"));
    EXPECT_NE(r.output.find("records"), std::string::npos);

    r = run_cli("preprocess --manifest " + raw + "/manifest.json --out " + prep);
    ASSERT_EQ(r.code, 0) << r.output;

    r = run_cli("train --manifest " + prep + "/manifest.json --models-dir " + models + " --seed 9" +
                kTinyTrain);
    ASSERT_EQ(r.code, 0) << r.output;
    for (const char* cls : {"NSR", "CD", "HYP", "MI", "STTC"}) {
        EXPECT_TRUE(fs::exists(dir / "models" / ("model_" + std::string(cls) + ".atcn"))) << cls;
        EXPECT_TRUE(fs::exists(dir / "models" / ("train_" + std::string(cls) + ".log"))) << cls;
    }

    const auto pred_json = (dir / "pred.json").string();
    r = run_cli("predict --manifest " + prep + "/manifest.json --models-dir " + models +
                " --out " + pred_json);
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("syn-"), std::string::npos);
    const auto pred = nlohmann::json::parse(slurp(pred_json));
    ASSERT_FALSE(pred.empty());
    EXPECT_TRUE(pred[0].contains("probs"));
    EXPECT_TRUE(pred[0].contains("risk"));

    const auto eval_json = (dir / "eval.json").string();
    r = run_cli("evaluate --manifest " + prep + "/manifest.json --models-dir " + models +
                " --out " + eval_json);
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("macro F1"), std::string::npos);
    EXPECT_NE(r.output.find("exact match"), std::string::npos);
    const auto eval = nlohmann::json::parse(slurp(eval_json));
    EXPECT_TRUE(eval.contains("classes"));
    EXPECT_TRUE(eval["classes"].contains("MI"));

    // attention export for the first record in the manifest
    const auto manifest = nlohmann::json::parse(slurp(dir / "prep" / "manifest.json"));
    const std::string rec_id = manifest["records"][0]["id"];
    const auto attn_json = (dir / "attn.json").string();
    r = run_cli("export-attention --manifest " + prep + "/manifest.json --models-dir " + models +
                " --class CD --record " + rec_id + " --out " + attn_json);
    ASSERT_EQ(r.code, 0) << r.output;
    const auto attn = nlohmann::json::parse(slurp(attn_json));
    EXPECT_EQ(attn["record"], rec_id);
    EXPECT_EQ(attn["beta"].size(), 12u);
    EXPECT_EQ(attn["alpha"]["II"].size(), 100u);
}

TEST(Cli, TrainingIsDeterministicAndParallelSafe) {
    const auto dir = fresh_dir("determinism");
    const auto raw = (dir / "raw").string();
    ASSERT_EQ(run_cli("synth --out " + raw + " --count 60 --samples 80 --seed 5").code, 0);
    const std::string manifest = raw + "/manifest.json";

    ASSERT_EQ(run_cli("train --manifest " + manifest + " --models-dir " + (dir / "a").string() +
                      " --seed 11" + kTinyTrain)
                  .code,
              0);
    ASSERT_EQ(run_cli("train --manifest " + manifest + " --models-dir " + (dir / "b").string() +
                      " --seed 11" + kTinyTrain)
                  .code,
              0);
    ASSERT_EQ(run_cli("train --manifest " + manifest + " --models-dir " + (dir / "c").string() +
                      " --seed 11 --parallel" + kTinyTrain)
                  .code,
              0);
    ASSERT_EQ(run_cli("train --manifest " + manifest + " --models-dir " + (dir / "d").string() +
                      " --seed 12" + kTinyTrain)
                  .code,
              0);

    for (const char* cls : {"NSR", "CD", "HYP", "MI", "STTC"}) {
        const auto file = "model_" + std::string(cls) + ".atcn";
        const auto a = slurp(dir / "a" / file);
        ASSERT_FALSE(a.empty());
        EXPECT_EQ(a, slurp(dir / "b" / file)) << cls << ": same seed, different bytes";
        EXPECT_EQ(a, slurp(dir / "c" / file)) << cls << ": parallel changed the result";
        EXPECT_NE(a, slurp(dir / "d" / file)) << cls << ": seed had no effect";
    }
}

TEST(Cli, SelectLeadsFindsInformativeLead) {
    const auto dir = fresh_dir("select");
    const auto raw = (dir / "raw").string();
    ASSERT_EQ(run_cli("synth --out " + raw + " --count 60 --samples 80 --seed 7 --preset single" +
                      " --informative-lead 4")
                  .code,
              0);
    const std::string manifest = raw + "/manifest.json";
    const auto models = (dir / "models").string();
    ASSERT_EQ(run_cli("train --manifest " + manifest + " --models-dir " + models + " --seed 13" +
                      " --class MI" + kTinyTrain)
                  .code,
              0);

    const auto out = (dir / "sweep.json").string();
    const auto r2 = run_cli("select-leads --manifest " + manifest + " --models-dir " + models +
                            " --class MI --seed 13 --lr 0.003 --epochs 2 --patience 2 --out " +
                            out);
    ASSERT_EQ(r2.code, 0) << r2.output;
    EXPECT_NE(r2.output.find("optimal subset size"), std::string::npos);
    const auto sweep = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(sweep["sweep"].size(), 12u);
    EXPECT_GE(sweep["optimal_k"].get<int>(), 1);
}

TEST(Cli, ExitCodesNameTheProblem) {
    const auto dir = fresh_dir("exit_codes");

    // 2: input manifest missing
    auto r = run_cli("train --manifest " + (dir / "nope.json").string() + " --models-dir " +
                     (dir / "m").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("manifest"), std::string::npos);

    // small real dataset for the remaining cases
    const auto raw = (dir / "raw").string();
    ASSERT_EQ(run_cli("synth --out " + raw + " --count 50 --samples 80 --seed 15").code, 0);
    const std::string manifest = raw + "/manifest.json";
    const auto models = (dir / "models").string();
    ASSERT_EQ(run_cli("train --manifest " + manifest + " --models-dir " + models + " --seed 17" +
                      kTinyTrain)
                  .code,
              0);

    // 3: ensemble missing a member
    const auto partial = dir / "partial";
    fs::create_directories(partial);
    for (const char* cls : {"NSR", "CD", "HYP", "MI"})
        fs::copy_file(dir / "models" / ("model_" + std::string(cls) + ".atcn"),
                      partial / ("model_" + std::string(cls) + ".atcn"));
    r = run_cli("predict --manifest " + manifest + " --models-dir " + partial.string());
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.output.find("model_STTC.atcn"), std::string::npos);

    // 4: requested partition empty (the manifest has only a development record)
    const auto dev_only = dir / "dev_only";
    fs::create_directories(dev_only);
    fs::create_directories(dev_only / "signals");
    fs::copy_file(dir / "raw" / "signals" / "syn-00000.f32", dev_only / "signals" / "syn-00000.f32");
    std::ofstream(dev_only / "manifest.json")
        << R"({"version": 1, "sampling_rate_hz": 100.0, "records": [{"id": "syn-00000",)"
        << R"( "file": "signals/syn-00000.f32", "labels": ["NSR"], "partition": "development"}]})";
    r = run_cli("evaluate --manifest " + (dev_only / "manifest.json").string() + " --models-dir " +
                models);
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.output.find("partition"), std::string::npos);

    // 5: class without a trained model
    const auto empty = dir / "empty_models";
    fs::create_directories(empty);
    r = run_cli("export-attention --manifest " + manifest + " --models-dir " + empty.string() +
                " --class HYP --record syn-00000 --out " + (dir / "x.json").string());
    EXPECT_EQ(r.code, 5);
    EXPECT_NE(r.output.find("HYP"), std::string::npos);

    // 1: anything else, like an unknown record id
    r = run_cli("export-attention --manifest " + manifest + " --models-dir " + models +
                " --class HYP --record no-such-record --out " + (dir / "x.json").string());
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, HelpAndParseErrors) {
    EXPECT_EQ(run_cli("--help").code, 0);
    EXPECT_EQ(run_cli("").code, 1);                  // a subcommand is required
    EXPECT_EQ(run_cli("synth").code, 1);             // --out is required
    EXPECT_EQ(run_cli("definitely-not-a-command").code, 1);
    EXPECT_EQ(run_cli("synth --out /tmp/x --no-such-flag").code, 1);
}

}  // namespace
