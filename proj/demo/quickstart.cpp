// Fit Euclidean and move-labeled k-NN on one iris split and print accuracy
// and N_10 skewness for each.

#include <iomanip>
#include <iostream>

#include "ridgeknn/ridgeknn.hpp"

using namespace ridgeknn;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : RIDGEKNN_IRIS_CSV;
  const Dataset ds = load_dataset(path, Format::DenseCsv);
  const Split sp = split(ds, 0.7, 1);

  const auto scaling = fit_centering(select_rows(ds.features, sp.train));
  const Matrix train = scaling.apply(select_rows(ds.features, sp.train));
  const Matrix test = scaling.apply(select_rows(ds.features, sp.test));
  const LabelList y_train = select(ds.labels, sp.train);
  const LabelList y_test = select(ds.labels, sp.test);

  const auto targets = select_targets(train, y_train, 1);
  const auto model = fit_transform(train, targets, Direction::MoveLabeled, 0.1);

  const KnnModel euclid(train, y_train, 3);
  const KnnModel moved(train, y_train, 3, Dissimilarity::from(model));

  std::cout << std::fixed << std::setprecision(3);
  for (const auto* m : {&euclid, &moved}) {
    const auto stats = nk_stats(KnnModel(train, y_train, 10, m->dissimilarity()), test, 10);
    std::cout << std::setw(14) << std::left << m->dissimilarity().name()
              << " accuracy " << m->evaluate(test, y_test)
              << "  N10 skewness " << stats.skewness.value_or(0.0) << '\n';
  }
}
