use crate::data::Dataset;
use crate::metrics::ClassCounts;

/// A candidate binary cut of a numeric attribute.
pub(crate) struct Cut {
    pub threshold: f64,
    pub le: ClassCounts,
    pub gt: ClassCounts,
}

/// Cuts between adjacent distinct values that lie on a class boundary: the
/// cut is skipped when both neighbouring values carry one and the same class.
/// The threshold is the lower observed value, so `x <= threshold` goes left.
/// Cuts leaving fewer than `min_side` instances on either side are dropped.
/// Returned in ascending threshold order.
pub(crate) fn boundary_cuts(dataset: &Dataset, rows: &[usize], attribute: usize, min_side: usize) -> Vec<Cut> {
    let num_classes = dataset.schema.num_classes();
    let mut points: Vec<(f64, usize)> = rows
        .iter()
        .map(|&r| {
            let x = dataset.instances[r].get(attribute).as_numeric().expect("numeric value");
            (x, dataset.class_of(r).expect("class present"))
        })
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Group by distinct value: (value, class tally of that value).
    let mut groups: Vec<(f64, ClassCounts)> = Vec::new();
    for (x, c) in points {
        match groups.last_mut() {
            Some((v, counts)) if *v == x => counts.add(c),
            _ => {
                let mut counts = ClassCounts::zeros(num_classes);
                counts.add(c);
                groups.push((x, counts));
            }
        }
    }

    let total: Vec<usize> = {
        let mut t = vec![0; num_classes];
        for (_, g) in &groups {
            for (s, &c) in t.iter_mut().zip(g.counts()) {
                *s += c;
            }
        }
        t
    };
    let mut left = vec![0; num_classes];
    let mut out = Vec::new();
    for pair in groups.windows(2) {
        let (x, ref here) = pair[0];
        let (_, ref next) = pair[1];
        for (s, &c) in left.iter_mut().zip(here.counts()) {
            *s += c;
        }
        let same_single_class = here.is_pure() && next.is_pure() && here.majority() == next.majority();
        if same_single_class {
            continue;
        }
        let le = ClassCounts::new(left.clone());
        let gt = ClassCounts::new(total.iter().zip(&left).map(|(t, l)| t - l).collect());
        if le.total() < min_side || gt.total() < min_side {
            continue;
        }
        out.push(Cut { threshold: x, le, gt });
    }
    out
}

/// Splits rows by a threshold.
pub(crate) fn split_rows(dataset: &Dataset, rows: &[usize], attribute: usize, threshold: f64) -> (Vec<usize>, Vec<usize>) {
    rows.iter().partition(|&&r| {
        dataset.instances[r].get(attribute).as_numeric().expect("numeric value") <= threshold
    })
}
