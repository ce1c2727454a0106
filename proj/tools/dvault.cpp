// dvault command-line tool: key management, image encrypt/decrypt,
// replicated multi-cloud store/fetch, and statistical analysis.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dvault/dvault.hpp"

namespace fs = std::filesystem;

namespace {

/// Deterministic when constructed with a seed, entropy-backed otherwise.
struct CliRng {
  explicit CliRng(std::optional<std::uint64_t> seed) {
    if (seed) det.emplace(*seed);
  }
  std::uint64_t next_u64() { return det ? det->next_u64() : sys.next_u64(); }

  std::optional<dvault::SplitMix64> det;
  dvault::SystemRng sys;
};

std::vector<std::uint8_t> read_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dvault::IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw dvault::IoError("read failed on " + path.string());
  return bytes;
}

std::string read_text(const fs::path& path) {
  return dvault::detail::read_text_file(path);
}

void write_binary(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw dvault::IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw dvault::IoError("write failed on " + path.string());
}

dvault::GrayImage load_gray(const fs::path& path,
                            std::optional<std::uint32_t> width,
                            std::optional<std::uint32_t> height) {
  if (width.has_value() != height.has_value())
    throw dvault::InvalidArgument("--width and --height go together");
  if (width) return dvault::read_raw(path, *width, *height);
  return dvault::read_pgm(path);
}

std::uint16_t pick_key(const dvault::KeyRegistry& registry,
                       std::optional<std::uint16_t> requested, CliRng& rng) {
  if (requested) {
    if (!registry.contains(*requested))
      throw dvault::UnknownKey("key_id " + std::to_string(*requested) +
                               " not in registry");
    return *requested;
  }
  const auto complete = registry.complete_key_ids();
  if (complete.empty())
    throw dvault::RegistryError(
        "registry has no complete key; pass --key-id to force one");
  return complete[dvault::bounded(rng, complete.size())];
}

void print_key_report(std::ostream& os, const dvault::KeyReport& report,
                      const std::string& name) {
  os << "key " << report.key_id << (name.empty() ? "" : " (" + name + ")")
     << ": " << (report.complete ? "complete" : "incomplete")
     << ", windows=" << report.window_count
     << ", min_multiplicity=" << report.min_multiplicity
     << ", absent_quadruples=" << report.absent
     << ", mean_multiplicity=" << report.mean_multiplicity_present << "\n";
}

std::string ratio_or(const std::optional<double>& v) {
  return v ? std::to_string(*v) : std::string();
}

void write_histogram_render(const fs::path& path, const dvault::Histogram& h) {
  constexpr std::uint32_t kHeight = 100;
  std::uint64_t peak = 1;
  for (auto c : h) peak = std::max(peak, c);
  dvault::GrayImage img{256, kHeight, std::vector<std::uint8_t>(256 * kHeight, 0)};
  for (std::uint32_t bin = 0; bin < 256; ++bin) {
    const auto bar = static_cast<std::uint32_t>(h[bin] * kHeight / peak);
    for (std::uint32_t y = 0; y < bar; ++y)
      img.pixels[(kHeight - 1 - y) * 256 + bin] = 255;
  }
  dvault::write_pgm(path, img);
}

int run(int argc, char** argv) {
  CLI::App app{
      "dvault: grayscale image encryption over DNA key sequences with "
      "replicated multi-cloud storage"};
  app.require_subcommand(1);

  // ---- key ----
  auto* key = app.add_subcommand("key", "manage the key registry");
  key->require_subcommand(1);
  std::string registry_dir;
  std::string fasta_path;
  std::optional<std::uint16_t> key_id_flag;

  auto* key_add = key->add_subcommand("add", "ingest a FASTA file");
  key_add->add_option("--registry", registry_dir, "registry directory")
      ->required();
  key_add->add_option("--fasta", fasta_path, "FASTA file to add")->required();
  key_add->callback([&] {
    dvault::KeyRegistry registry{registry_dir};
    const auto id = registry.add_key(fasta_path);
    const auto key_seq = registry.load(id);
    std::cout << "added key " << id << ": " << registry.entries().back().filename
              << " (" << key_seq.bases.size() << " bases)\n";
  });

  auto* key_list = key->add_subcommand("list", "list registered keys");
  key_list->add_option("--registry", registry_dir, "registry directory")
      ->required();
  key_list->callback([&] {
    dvault::KeyRegistry registry{registry_dir};
    for (const auto& e : registry.entries())
      std::cout << e.key_id << "\t" << e.filename << "\t" << e.sha256_hex
                << "\n";
  });

  auto* key_validate =
      key->add_subcommand("validate", "report quadruple coverage of a key");
  key_validate->add_option("--registry", registry_dir, "registry directory");
  key_validate->add_option("--id", key_id_flag, "registered key id");
  key_validate->add_option("--fasta", fasta_path,
                           "validate a FASTA file directly");
  key_validate->callback([&] {
    if (!fasta_path.empty()) {
      const auto key_seq =
          dvault::ingest_fasta(read_text(fasta_path), fasta_path);
      print_key_report(std::cout,
                       dvault::validate_key(dvault::KeyIndex(key_seq)),
                       fasta_path);
      return;
    }
    if (registry_dir.empty() || !key_id_flag)
      throw dvault::InvalidArgument(
          "need --fasta, or --registry with --id");
    dvault::KeyRegistry registry{registry_dir};
    print_key_report(std::cout,
                     dvault::validate_key(registry.index(*key_id_flag)), "");
  });

  // ---- encrypt ----
  auto* enc = app.add_subcommand("encrypt", "encrypt a grayscale image");
  std::string in_path, out_path, keys_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> raw_w, raw_h;
  int pattern_flag = -1;
  unsigned pointer_width = 4;
  bool no_corner_embed = false;
  enc->add_option("--in", in_path, "input image (PGM, or raw with --width/--height)")
      ->required();
  enc->add_option("--out", out_path, "output container")->required();
  enc->add_option("--keys", keys_dir, "key registry directory")->required();
  enc->add_option("--key-id", key_id_flag, "key id (default: random complete key)");
  enc->add_option("--pattern", pattern_flag, "scrambling pattern 0..15 (default: random)")
      ->check(CLI::Range(0, 15));
  enc->add_option("--seed", seed, "deterministic seed");
  enc->add_flag("--no-corner-embed", no_corner_embed,
                "keep metadata in the header instead of the corner pointers");
  enc->add_option("--pointer-width", pointer_width, "bytes per pointer, 1..4")
      ->check(CLI::Range(1, 4));
  enc->add_option("--width", raw_w, "raw input width");
  enc->add_option("--height", raw_h, "raw input height");
  enc->callback([&] {
    const auto img = load_gray(in_path, raw_w, raw_h);
    dvault::KeyRegistry registry{keys_dir};
    CliRng rng(seed);
    const auto kid = pick_key(registry, key_id_flag, rng);
    const dvault::PatternId pattern{
        pattern_flag >= 0 ? std::uint8_t(pattern_flag)
                          : std::uint8_t(dvault::bounded(rng, 16))};
    dvault::EncryptOptions opts;
    opts.pointer_width = std::uint8_t(pointer_width);
    opts.corner_embed = !no_corner_embed;
    if (seed) opts.seed = rng.next_u64();
    const auto container =
        dvault::encrypt(std::span<const std::uint8_t>(img.pixels), img.width,
                        img.height, registry.index(kid), pattern, rng, opts);
    write_binary(out_path, dvault::serialize(container));
    std::cout << "encrypted " << img.width << "x" << img.height << " -> "
              << out_path << " (key " << kid << ", pattern " << int(pattern.id)
              << ", metadata "
              << (container.corner_embedded ? "in corners" : "in header")
              << ")\n";
  });

  // ---- decrypt ----
  auto* dec = app.add_subcommand("decrypt", "decrypt a container");
  bool raw_out = false;
  dec->add_option("--in", in_path, "input container")->required();
  dec->add_option("--out", out_path, "output image")->required();
  dec->add_option("--keys", keys_dir, "key registry directory")->required();
  dec->add_flag("--raw", raw_out, "write headerless bytes instead of PGM");
  dec->callback([&] {
    const auto container = dvault::deserialize(read_binary(in_path));
    dvault::KeyRegistry registry{keys_dir};
    const auto pixels = dvault::decrypt(container, registry);
    if (raw_out)
      dvault::write_raw(out_path, pixels);
    else
      dvault::write_pgm(out_path,
                        {container.width, container.height, pixels});
    std::cout << "decrypted " << in_path << " -> " << out_path << " ("
              << container.width << "x" << container.height << ")\n";
  });

  // ---- store ----
  auto* store = app.add_subcommand(
      "store", "encrypt independently per cloud and upload replicas");
  std::string clouds_path, manifest_path, image_name;
  store->add_option("--in", in_path, "input image")->required();
  store->add_option("--clouds", clouds_path, "cloud config file")->required();
  store->add_option("--keys", keys_dir, "key registry directory")->required();
  store->add_option("--manifest", manifest_path, "manifest output path")
      ->required();
  store->add_option("--name", image_name, "image name recorded in the manifest");
  store->add_option("--seed", seed, "deterministic seed");
  store->add_option("--pointer-width", pointer_width, "bytes per pointer, 1..4")
      ->check(CLI::Range(1, 4));
  store->add_flag("--no-corner-embed", no_corner_embed,
                  "keep metadata in container headers");
  store->add_option("--width", raw_w, "raw input width");
  store->add_option("--height", raw_h, "raw input height");
  store->callback([&] {
    const auto img = load_gray(in_path, raw_w, raw_h);
    const auto clouds = dvault::load_cloud_config(clouds_path);
    dvault::KeyRegistry registry{keys_dir};
    CliRng rng(seed);
    dvault::EncryptOptions opts;
    opts.pointer_width = std::uint8_t(pointer_width);
    opts.corner_embed = !no_corner_embed;
    const std::string name =
        image_name.empty() ? fs::path(in_path).filename().string()
                           : image_name;
    const auto manifest = dvault::store_replicated(
        std::span<const std::uint8_t>(img.pixels), img.width, img.height,
        clouds, registry, rng, opts, name);
    dvault::detail::write_text_file(manifest_path,
                                    dvault::serialize_manifest(manifest));
    std::cout << "stored " << manifest.replicas.size() << "/" << clouds.size()
              << " replicas of " << name << "; manifest -> " << manifest_path
              << "\n";
    for (const auto& r : manifest.replicas)
      std::cout << "  " << r.cloud_id << " object " << r.object_id.substr(0, 16)
                << "... key " << r.key_id << " pattern " << int(r.pattern)
                << "\n";
  });

  // ---- fetch ----
  auto* fetch = app.add_subcommand(
      "fetch", "retrieve the first intact replica and decrypt it");
  fetch->add_option("--manifest", manifest_path, "manifest file")->required();
  fetch->add_option("--clouds", clouds_path, "cloud config file")->required();
  fetch->add_option("--keys", keys_dir, "key registry directory")->required();
  fetch->add_option("--out", out_path, "output image")->required();
  fetch->add_flag("--raw", raw_out, "write headerless bytes instead of PGM");
  fetch->callback([&] {
    const auto manifest = dvault::parse_manifest(read_text(manifest_path));
    const auto clouds = dvault::load_cloud_config(clouds_path);
    dvault::KeyRegistry registry{keys_dir};
    const auto pixels = dvault::retrieve(manifest, clouds, registry);
    if (raw_out)
      dvault::write_raw(out_path, pixels);
    else
      dvault::write_pgm(out_path,
                        {manifest.width, manifest.height, pixels});
    std::cout << "fetched " << manifest.image_name << " -> " << out_path
              << " (" << manifest.width << "x" << manifest.height << ")\n";
  });

  // ---- analyze ----
  auto* analyze = app.add_subcommand(
      "analyze", "adjacent-pixel correlation, histograms and avalanche");
  std::string plain_path, cipher_path, csv_path, hist_dir;
  analyze->add_option("--plain", plain_path, "plaintext image")->required();
  analyze->add_option("--cipher", cipher_path, "encrypted container")
      ->required();
  analyze->add_option("--out", csv_path, "CSV report path")->required();
  analyze->add_option("--keys", keys_dir,
                      "key registry (enables avalanche and keyspace report)");
  analyze->add_option("--hist-dir", hist_dir,
                      "directory for histogram renders");
  analyze->add_option("--seed", seed, "deterministic seed");
  analyze->add_option("--width", raw_w, "raw plaintext width");
  analyze->add_option("--height", raw_h, "raw plaintext height");
  analyze->callback([&] {
    const auto plain = load_gray(plain_path, raw_w, raw_h);
    const auto container = dvault::deserialize(read_binary(cipher_path));
    const auto rendered = dvault::render_cipher_image(container);

    const auto hist_plain = dvault::histogram(plain.pixels);
    const auto hist_cipher = dvault::histogram(rendered.bytes);
    const double hist_dist = dvault::histogram_distance(hist_plain, hist_cipher);

    std::optional<double> cell_ratio, bit_ratio;
    if (!keys_dir.empty()) {
      dvault::KeyRegistry registry{keys_dir};
      const std::uint16_t kid = container.corner_embedded
                                    ? dvault::extract_corner_metadata(container).key_id
                                    : container.key_id;
      const dvault::PatternId pattern{
          container.corner_embedded
              ? dvault::extract_corner_metadata(container).pattern.id
              : container.pattern};
      CliRng rng(seed);
      dvault::EncryptOptions opts;
      opts.pointer_width = container.pointer_width;
      opts.corner_embed = container.corner_embedded;
      const auto report = dvault::avalanche(
          std::span<const std::uint8_t>(plain.pixels), plain.width,
          plain.height, 0, registry.index(kid), pattern, rng.next_u64(),
          rng.next_u64(), opts);
      cell_ratio = report.cell_change_ratio;
      bit_ratio = report.bit_change_ratio;

      const auto ks = dvault::keyspace_report(registry);
      std::cout << "keyspace: " << ks.key_count << " keys x "
                << ks.pattern_count << " patterns; mean per-cell choice "
                << ks.mean_log2_choices << " bits\n";
    }

    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw dvault::IoError("cannot open " + csv_path);
    csv << "image,direction,r_plain,r_cipher,hist_distance,"
           "avalanche_cell_ratio,avalanche_bit_ratio\n";
    const std::string image_label = fs::path(plain_path).filename().string();
    for (auto direction : {dvault::Direction::Horizontal,
                           dvault::Direction::Vertical,
                           dvault::Direction::Diagonal}) {
      const auto r_of = [&](std::span<const std::uint8_t> bytes,
                            std::uint32_t w, std::uint32_t h) -> std::string {
        try {
          return std::to_string(dvault::correlation(bytes, w, h, direction).r);
        } catch (const dvault::DegenerateVariance&) {
          return "degenerate";
        }
      };
      csv << image_label << ',' << dvault::to_string(direction) << ','
          << r_of(plain.pixels, plain.width, plain.height) << ','
          << r_of(rendered.bytes, rendered.width, rendered.height) << ','
          << hist_dist << ',' << ratio_or(cell_ratio) << ','
          << ratio_or(bit_ratio) << "\n";
    }
    csv.close();

    if (!hist_dir.empty()) {
      fs::create_directories(hist_dir);
      write_histogram_render(fs::path(hist_dir) / "hist_plain.pgm", hist_plain);
      write_histogram_render(fs::path(hist_dir) / "hist_cipher.pgm",
                             hist_cipher);
      std::ofstream hcsv(fs::path(hist_dir) / "histograms.csv",
                         std::ios::trunc);
      hcsv << "bin,plain,cipher\n";
      for (int i = 0; i < 256; ++i)
        hcsv << i << ',' << hist_plain[i] << ',' << hist_cipher[i] << "\n";
    }
    std::cout << "analysis written to " << csv_path << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dvault::Error& e) {
    std::cerr << "dvault: " << e.what() << "\n";
    const auto& n = e.name();
    const bool integrity = n == "ChecksumMismatch" || n == "IntegrityFailure" ||
                           n == "AllBackendsFailed" ||
                           n == "AllReplicasUnavailable";
    return integrity ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "dvault: " << e.what() << "\n";
    return 1;
  }
}
