// Python bindings for the ergan core: fixtures, clustering, GAN training,
// ensemble synthesis and the evaluation metrics, with numpy interop.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <utility>

#include "ergan/cluster.hpp"
#include "ergan/dataset.hpp"
#include "ergan/ensemble.hpp"
#include "ergan/errors.hpp"
#include "ergan/eval.hpp"
#include "ergan/fixture.hpp"
#include "ergan/gan.hpp"
#include "ergan/pipeline.hpp"

namespace py = pybind11;
using namespace ergan;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Dataset dataset_from_array(const DArray& values, const std::vector<std::string>* ids = nullptr) {
    if (values.ndim() != 2 || values.shape(1) != static_cast<py::ssize_t>(kHoursPerDay)) {
        throw DataError("expected an (N, 24) array of profile values");
    }
    const auto n = static_cast<std::size_t>(values.shape(0));
    if (ids && ids->size() != n) throw DataError("source_ids length does not match values");
    Dataset d;
    d.profiles.resize(n);
    auto view = values.unchecked<2>();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < kHoursPerDay; ++t) {
            d.profiles[i].values[t] = view(i, t);
        }
        d.profiles[i].source_id = ids ? (*ids)[i] : "p" + std::to_string(i);
    }
    return d;
}

py::array_t<double> array_from_dataset(const Dataset& d) {
    py::array_t<double> out({d.size(), kHoursPerDay});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t t = 0; t < kHoursPerDay; ++t) view(i, t) = d.profiles[i].values[t];
    }
    return out;
}

std::vector<std::string> ids_from_dataset(const Dataset& d) {
    std::vector<std::string> ids;
    ids.reserve(d.size());
    for (const auto& p : d.profiles) ids.push_back(p.source_id);
    return ids;
}

py::array_t<double> array_from_vector(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
    return out;
}

py::array_t<double> array_from_centroids(const std::vector<Centroid>& centroids) {
    py::array_t<double> out({centroids.size(), kHoursPerDay});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
        for (std::size_t t = 0; t < kHoursPerDay; ++t) view(k, t) = centroids[k][t];
    }
    return out;
}

std::vector<Centroid> centroids_from_array(const DArray& arr) {
    if (arr.ndim() != 2 || arr.shape(1) != static_cast<py::ssize_t>(kHoursPerDay)) {
        throw DataError("expected a (K, 24) centroid array");
    }
    std::vector<Centroid> out(static_cast<std::size_t>(arr.shape(0)));
    auto view = arr.unchecked<2>();
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (std::size_t t = 0; t < kHoursPerDay; ++t) out[k][t] = view(k, t);
    }
    return out;
}

std::vector<FixtureSpec> spec_from_python(
    const std::vector<std::tuple<std::string, std::size_t, double>>& items) {
    std::vector<FixtureSpec> spec;
    for (const auto& [name, count, noise] : items) {
        spec.push_back(FixtureSpec{archetype_from_name(name), count, noise});
    }
    return spec;
}

TrainConfig config_from_kwargs(std::size_t epochs, std::size_t batch_size, double gen_lr,
                               double disc_lr, double lambda, std::uint64_t seed,
                               std::size_t hidden, std::size_t layers, bool non_saturating,
                               const std::string& stat_mode) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.gen_lr = gen_lr;
    cfg.disc_lr = disc_lr;
    cfg.lambda = lambda;
    cfg.seed = seed;
    cfg.hidden = hidden;
    cfg.layers = layers;
    cfg.non_saturating = non_saturating;
    if (stat_mode == "pattern_scalar") {
        cfg.stat_mode = StatLossMode::kPatternScalar;
    } else if (stat_mode == "hourly_vector") {
        cfg.stat_mode = StatLossMode::kHourlyVector;
    } else {
        throw DataError("stat_mode must be 'pattern_scalar' or 'hourly_vector'");
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Synthetic residential load patterns via clustered recurrent GANs";
    m.attr("__version__") = "0.1.0";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<ClusterModel>(m, "ClusterModel")
        .def_readonly("k", &ClusterModel::k)
        .def_readonly("wcss", &ClusterModel::wcss)
        .def_readonly("db_index", &ClusterModel::db_index)
        .def_readonly("iterations_run", &ClusterModel::iterations_run)
        .def_property_readonly("labels",
                               [](const ClusterModel& c) {
                                   py::array_t<std::int64_t> out(
                                       static_cast<py::ssize_t>(c.labels.size()));
                                   auto v = out.mutable_unchecked<1>();
                                   for (std::size_t i = 0; i < c.labels.size(); ++i) {
                                       v(i) = static_cast<std::int64_t>(c.labels[i]);
                                   }
                                   return out;
                               })
        .def_property_readonly(
            "centroids", [](const ClusterModel& c) { return array_from_centroids(c.centroids); })
        .def_property_readonly("cluster_sizes", &ClusterModel::cluster_sizes)
        .def("__repr__", [](const ClusterModel& c) {
            return "<ClusterModel k=" + std::to_string(c.k) + " wcss=" + std::to_string(c.wcss) +
                   ">";
        });

    py::class_<GanPair>(m, "Gan")
        .def_readonly("cluster_index", &GanPair::cluster_index)
        .def_property_readonly("loss_history",
                               [](const GanPair& pair) {
                                   py::array_t<double> out(
                                       {pair.loss_history.size(), std::size_t{2}});
                                   auto v = out.mutable_unchecked<2>();
                                   for (std::size_t e = 0; e < pair.loss_history.size(); ++e) {
                                       v(e, 0) = pair.loss_history[e].first;
                                       v(e, 1) = pair.loss_history[e].second;
                                   }
                                   return out;
                               })
        .def(
            "generate",
            [](const GanPair& pair, std::size_t count, std::uint64_t seed) {
                Rng rng(seed);
                Dataset out;
                for (std::size_t i = 0; i < count; ++i) {
                    Mat noise = sample_noise(kHoursPerDay, 1, rng);
                    std::vector<double> z(noise.a.begin(), noise.a.end());
                    LoadProfile p;
                    const auto values = generator_forward(pair.gen, z);
                    std::copy(values.begin(), values.end(), p.values.begin());
                    out.profiles.push_back(std::move(p));
                }
                return array_from_dataset(out);
            },
            py::arg("count"), py::arg("seed"),
            "Sample `count` synthetic profiles from this generator")
        .def(
            "discriminate",
            [](const GanPair& pair, const DArray& values) {
                Dataset d = dataset_from_array(values);
                std::vector<double> scores;
                for (const auto& p : d.profiles) {
                    scores.push_back(discriminator_forward(pair.disc, p.values));
                }
                return array_from_vector(scores);
            },
            py::arg("values"), "Discriminator probability score per profile")
        .def("save",
             [](const GanPair& pair, const std::string& path) { save_checkpoint(pair, path); })
        .def_static("load", [](const std::string& path) { return load_checkpoint(path); });

    m.def(
        "fixture_generate",
        [](const std::vector<std::tuple<std::string, std::size_t, double>>& spec,
           std::uint64_t seed) {
            Dataset d = fixture_generate(spec_from_python(spec), seed);
            return py::make_tuple(array_from_dataset(d), ids_from_dataset(d));
        },
        py::arg("spec"), py::arg("seed"),
        "Deterministic fixture profiles; spec is [(archetype, count, noise), ...]");

    m.def(
        "normalize",
        [](const DArray& raw) {
            if (raw.ndim() != 1 || raw.shape(0) != static_cast<py::ssize_t>(kHoursPerDay)) {
                throw DataError("expected a length-24 sequence");
            }
            std::array<double, kHoursPerDay> values;
            std::memcpy(values.data(), raw.data(), sizeof(values));
            LoadProfile p = ergan::normalize(
                std::span<const double, kHoursPerDay>(values), "py");
            return array_from_vector({p.values.begin(), p.values.end()});
        },
        py::arg("raw"), "Linear [0,1] scaling of a raw 24-hour sequence");

    m.def(
        "split",
        [](const DArray& values, double train_fraction, std::uint64_t seed) {
            Dataset d = dataset_from_array(values);
            auto [train, val] = ergan::split(d, train_fraction, seed);
            return py::make_tuple(array_from_dataset(train), array_from_dataset(val));
        },
        py::arg("values"), py::arg("train_fraction"), py::arg("seed"),
        "Seeded disjoint (train, validation) partition");

    m.def(
        "kmeans",
        [](const DArray& values, std::size_t k, std::uint64_t seed, std::size_t max_iter,
           double tol) {
            Dataset d = dataset_from_array(values);
            ClusterModel model = ergan::kmeans(d, k, seed, max_iter, tol);
            if (k >= 2) model.db_index = ergan::db_index(d, model.labels, model.centroids);
            return model;
        },
        py::arg("values"), py::arg("k"), py::arg("seed"), py::arg("max_iter") = 300,
        py::arg("tol") = 1e-6, "Lloyd k-means with k-means++ seeding");

    m.def(
        "db_index",
        [](const DArray& values, const std::vector<std::size_t>& labels, const DArray& centroids) {
            Dataset d = dataset_from_array(values);
            return ergan::db_index(d, labels, centroids_from_array(centroids));
        },
        py::arg("values"), py::arg("labels"), py::arg("centroids"));

    m.def(
        "wcss",
        [](const DArray& values, const std::vector<std::size_t>& labels, const DArray& centroids) {
            Dataset d = dataset_from_array(values);
            return ergan::wcss(d, labels, centroids_from_array(centroids));
        },
        py::arg("values"), py::arg("labels"), py::arg("centroids"));

    m.def(
        "select_k",
        [](const DArray& values, std::size_t k_lo, std::size_t k_hi, std::uint64_t seed) {
            Dataset d = dataset_from_array(values);
            auto report = ergan::select_k(d, k_lo, k_hi, seed);
            return py::make_tuple(report.candidates, report.chosen_k);
        },
        py::arg("values"), py::arg("k_lo"), py::arg("k_hi"), py::arg("seed"),
        "Returns ([(K, db_index), ...], chosen_K)");

    m.def(
        "train_gan",
        [](const DArray& values, std::size_t epochs, std::size_t batch_size, double gen_lr,
           double disc_lr, double lambda, std::uint64_t seed, std::size_t hidden,
           std::size_t layers, bool non_saturating, const std::string& stat_mode,
           int cluster_index) {
            Dataset d = dataset_from_array(values);
            return train_cluster_gan(d,
                                     config_from_kwargs(epochs, batch_size, gen_lr, disc_lr,
                                                        lambda, seed, hidden, layers,
                                                        non_saturating, stat_mode),
                                     cluster_index);
        },
        py::arg("values"), py::arg("epochs") = 500, py::arg("batch_size") = 1024,
        py::arg("gen_lr") = 1e-4, py::arg("disc_lr") = 1e-4, py::arg("lambda") = 100.0,
        py::arg("seed") = 0, py::arg("hidden") = 16, py::arg("layers") = 5,
        py::arg("non_saturating") = false, py::arg("stat_mode") = "pattern_scalar",
        py::arg("cluster_index") = 0, "Adversarial training of one cluster GAN");

    m.def(
        "allocate",
        [](std::size_t m_total, const std::vector<double>& alpha) {
            return ergan::allocate(m_total, alpha);
        },
        py::arg("m"), py::arg("alpha"), "Largest-remainder apportionment of m units");

    m.def("proportions",
          [](const std::vector<std::size_t>& sizes) { return ergan::proportions(sizes); });

    m.def(
        "synthesize",
        [](const std::vector<const GanPair*>& gans, const std::vector<std::size_t>& cluster_sizes,
           std::size_t m_total, std::uint64_t seed) {
            std::vector<GeneratorNet> generators;
            for (const GanPair* g : gans) generators.push_back(g->gen);
            SynthesisPlan plan = make_plan(m_total, cluster_sizes);
            Dataset d = ergan::synthesize(generators, plan, seed);
            return py::make_tuple(array_from_dataset(d), ids_from_dataset(d));
        },
        py::arg("gans"), py::arg("cluster_sizes"), py::arg("m"), py::arg("seed"),
        "Proportion-preserving ensemble synthesis");

    m.def(
        "hourly_profiles",
        [](const DArray& values) {
            auto s = ergan::hourly_profiles(dataset_from_array(values));
            py::dict out;
            out["mean"] = array_from_vector({s.mean.begin(), s.mean.end()});
            out["variance"] = array_from_vector({s.variance.begin(), s.variance.end()});
            out["q1"] = array_from_vector({s.q1.begin(), s.q1.end()});
            out["q3"] = array_from_vector({s.q3.begin(), s.q3.end()});
            return out;
        },
        py::arg("values"), "Per-hour mean/variance/Q1/Q3 profiles");

    m.def(
        "l1_distance",
        [](const DArray& real, const DArray& synth) {
            auto rs = ergan::hourly_profiles(dataset_from_array(real));
            auto ss = ergan::hourly_profiles(dataset_from_array(synth));
            auto l1 = ergan::l1_distance(rs, ss);
            return py::make_tuple(l1.mean_l1, l1.variance_l1, l1.q1_l1, l1.q3_l1);
        },
        py::arg("real"), py::arg("synth"),
        "(mean, variance, Q1, Q3) L1 distances between hourly profiles");

    m.def(
        "autocorrelation",
        [](const DArray& series, std::size_t max_lag) {
            if (series.ndim() != 1) throw DataError("expected a 1-D series");
            std::vector<double> x(series.data(), series.data() + series.shape(0));
            return array_from_vector(ergan::autocorrelation(x, max_lag));
        },
        py::arg("series"), py::arg("max_lag") = 23);

    m.def(
        "dataset_acf",
        [](const DArray& values, std::size_t max_lag) {
            return array_from_vector(ergan::dataset_acf(dataset_from_array(values), max_lag));
        },
        py::arg("values"), py::arg("max_lag") = 23,
        "Mean ACF over the non-constant profiles of a dataset");

    m.def(
        "histogram",
        [](const DArray& values, std::size_t bins) {
            return array_from_vector(ergan::histogram(dataset_from_array(values), bins));
        },
        py::arg("values"), py::arg("bins") = 50,
        "Pooled-value histogram over [0,1], normalized to sum 1");

    m.def(
        "boxplot_stats",
        [](const DArray& values) {
            auto boxes = ergan::boxplot_stats(dataset_from_array(values));
            py::array_t<double> out({kHoursPerDay, std::size_t{6}});
            auto v = out.mutable_unchecked<2>();
            for (std::size_t t = 0; t < kHoursPerDay; ++t) {
                v(t, 0) = boxes[t].lo_whisker;
                v(t, 1) = boxes[t].q1;
                v(t, 2) = boxes[t].median;
                v(t, 3) = boxes[t].q3;
                v(t, 4) = boxes[t].hi_whisker;
                v(t, 5) = static_cast<double>(boxes[t].outliers);
            }
            return out;
        },
        py::arg("values"),
        "Per-hour Tukey stats: columns lo_whisker, q1, median, q3, hi_whisker, outliers");

    m.def(
        "nearest_match",
        [](const DArray& profile, const DArray& values) {
            if (profile.ndim() != 1 || profile.shape(0) != static_cast<py::ssize_t>(kHoursPerDay)) {
                throw DataError("expected a length-24 profile");
            }
            LoadProfile p;
            std::memcpy(p.values.data(), profile.data(), sizeof(p.values));
            auto [idx, dist] = ergan::nearest_match(p, dataset_from_array(values));
            return py::make_tuple(idx, dist);
        },
        py::arg("profile"), py::arg("values"),
        "(index, distance) of the closest profile by Euclidean distance");

    m.def(
        "run_pipeline",
        [](const DArray& values, std::size_t fixed_k, std::size_t k_lo, std::size_t k_hi,
           std::size_t m_total, std::uint64_t seed, std::size_t jobs, std::size_t epochs,
           std::size_t batch_size, double gen_lr, double disc_lr, double lambda,
           std::size_t hidden, std::size_t layers, bool non_saturating,
           const std::string& stat_mode) {
            PipelineConfig cfg;
            cfg.fixed_k = fixed_k;
            cfg.k_lo = k_lo;
            cfg.k_hi = k_hi;
            cfg.synth_count = m_total;
            cfg.seed = seed;
            cfg.jobs = jobs;
            cfg.train = config_from_kwargs(epochs, batch_size, gen_lr, disc_lr, lambda, seed,
                                           hidden, layers, non_saturating, stat_mode);
            PipelineResult r = run_pipeline(dataset_from_array(values), cfg);
            py::dict out;
            out["chosen_k"] = r.clusters.k;
            out["clusters"] = r.clusters;
            out["allocation"] = r.plan.allocation;
            out["alpha"] = r.plan.alpha;
            out["synthetic"] = array_from_dataset(r.synthetic);
            out["synthetic_ids"] = ids_from_dataset(r.synthetic);
            out["candidates"] = r.selection.candidates;
            return out;
        },
        py::arg("values"), py::arg("fixed_k") = 0, py::arg("k_lo") = 2, py::arg("k_hi") = 12,
        py::arg("m") = 0, py::arg("seed") = 0, py::arg("jobs") = 1, py::arg("epochs") = 500,
        py::arg("batch_size") = 1024, py::arg("gen_lr") = 1e-4, py::arg("disc_lr") = 1e-4,
        py::arg("lambda") = 100.0, py::arg("hidden") = 16, py::arg("layers") = 5,
        py::arg("non_saturating") = false, py::arg("stat_mode") = "pattern_scalar",
        "Cluster, train per-cluster GANs and synthesize the ensemble dataset");
}
