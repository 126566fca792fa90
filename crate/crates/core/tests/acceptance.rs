//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits nonzero if any criterion fails.

mod common;

use std::net::SocketAddr;
use std::process::ExitCode;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use catchen::attack::{full_attack, recover_keystream, AttackTranscript};
use catchen::cipher::{encrypt, encrypt_with_parts, key_parts};
use catchen::keystream::{
    chen_derivative, integrate_chen, ChenParams, ChenState, IntegratorConfig,
};
use catchen::oracle::{
    EncryptionMachine, EncryptionOracle, OracleHandle, OracleServer, ShutdownHandle,
};
use catchen::permutation::{
    build_permutation, cat_matrix, iterate_matrix, shuffle, Mat2, PermutationMap,
};
use catchen::pgm::{decode_pgm, encode_pgm, PgmError};
use catchen::{vectors, SecretKey};
use common::{random_grid, random_key, synthetic_picture};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_worked_example() -> Outcome {
    let perm = vectors::permutation();
    let key = vectors::keystream();

    let c = encrypt_with_parts(&vectors::plain(), &perm, &key).map_err(err)?;
    ensure!(c == vectors::cipher(), "encrypt_with_parts(P) != C: {c:?}");
    ensure!(
        c.rows().next() == Some(&[174, 123, 7, 252][..]),
        "first row of C"
    );

    let mut oracle = OracleHandle::with_parts(perm.clone(), key.clone());
    let c1 = recover_keystream(&mut oracle, 4).map_err(err)?;
    ensure!(c1 == key, "C1 != K");

    let s = vectors::cipher().xor_bytes(c1.as_bytes()).map_err(err)?;
    ensure!(s == vectors::shuffled(), "C xor K != S: {s:?}");
    ensure!(
        s.rows().next() == Some(&[20, 99, 32, 180][..]),
        "first row of S"
    );

    let c2 = oracle.encrypt(&vectors::index_probe()).map_err(err)?;
    ensure!(
        c2 == vectors::index_probe_cipher(),
        "oracle(P2) != C2: {c2:?}"
    );
    let s2 = vectors::index_probe_cipher()
        .xor_bytes(key.as_bytes())
        .map_err(err)?;
    ensure!(
        s2 == vectors::index_probe_shuffled(),
        "C2 xor K != S2: {s2:?}"
    );
    ensure!(
        s2.rows().next() == Some(&[12, 14, 4, 6][..]),
        "first row of S2"
    );

    let mut attacker = OracleHandle::with_parts(perm, key);
    let t = full_attack(&mut attacker, &vectors::cipher()).map_err(err)?;
    ensure!(t.recovered_plaintext == vectors::plain(), "M != P");
    ensure!(t.oracle_queries == 2, "queries = {}", t.oracle_queries);
    Ok("C, C1 = K, S, S2 and M = P all byte-exact; 2 queries".into())
}

fn c2_two_couples() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC0FF_EE02);
    for trial in 0..100 {
        let side = [2, 3, 4, 8, 11, 16][trial % 6];
        let key = random_key(&mut rng);
        let plain = random_grid(&mut rng, side);
        let cipher = encrypt(&plain, &key).map_err(err)?;
        let t = full_attack(&mut OracleHandle::in_process(key), &cipher).map_err(err)?;
        ensure!(
            t.oracle_queries == 2,
            "N={side}: {} queries",
            t.oracle_queries
        );
        ensure!(
            t.recovered_plaintext == plain,
            "N={side}: wrong plaintext (trial {trial})"
        );
    }

    let key = random_key(&mut rng);
    let plain = synthetic_picture(100);
    let cipher = encrypt(&plain, &key).map_err(err)?;
    let t = full_attack(&mut OracleHandle::in_process(key), &cipher).map_err(err)?;
    ensure!(t.oracle_queries == 3, "N=100: {} queries", t.oracle_queries);
    ensure!(t.recovered_plaintext == plain, "N=100: wrong plaintext");
    let summary = t.query_summary();
    ensure!(
        summary.contains("8-bit") && summary.contains("base-256"),
        "summary lacks cause: {summary}"
    );
    Ok(format!("N<=16: 2 queries x100, exact; {summary}"))
}

fn c3_end_to_end() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC0FF_EE03);
    let sides = [2, 4, 8, 16, 32, 64];
    for trial in 0..500 {
        let side = sides[trial % sides.len()];
        let key = random_key(&mut rng);
        let plain = random_grid(&mut rng, side);
        let cipher = encrypt(&plain, &key).map_err(err)?;
        let t = full_attack(&mut OracleHandle::in_process(key), &cipher).map_err(err)?;
        let errors = t
            .recovered_plaintext
            .as_bytes()
            .iter()
            .zip(plain.as_bytes())
            .filter(|(a, b)| a != b)
            .count();
        ensure!(errors == 0, "trial {trial} N={side}: {errors} byte errors");
    }
    Ok("500 trials, 0 byte errors".into())
}

fn naive_power(a: &Mat2, n: u64, modulus: u64) -> Mat2 {
    let a = a.map(|r| r.map(|v| v % modulus));
    let mut acc = [[1 % modulus, 0], [0, 1 % modulus]];
    for _ in 0..n {
        acc = [
            [
                (acc[0][0] * a[0][0] + acc[0][1] * a[1][0]) % modulus,
                (acc[0][0] * a[0][1] + acc[0][1] * a[1][1]) % modulus,
            ],
            [
                (acc[1][0] * a[0][0] + acc[1][1] * a[1][0]) % modulus,
                (acc[1][0] * a[0][1] + acc[1][1] * a[1][1]) % modulus,
            ],
        ];
    }
    acc
}

fn c4_cat_map_algebra() -> Outcome {
    let mut checked = 0;
    for p in 1..=5 {
        for q in 1..=5 {
            let a = cat_matrix(p, q).map_err(err)?;
            for n in 0..=50 {
                for modulus in [4u64, 5, 16, 100] {
                    let m = iterate_matrix(&a, n, modulus).map_err(err)?;
                    let want = naive_power(&a, n, modulus);
                    ensure!(
                        m.entries() == want,
                        "p={p} q={q} n={n} N={modulus}: {:?} != {want:?}",
                        m.entries()
                    );
                    ensure!(
                        m.det_mod() == 1,
                        "det != 1 for p={p} q={q} n={n} N={modulus}"
                    );
                    let perm = build_permutation(&m).map_err(err)?;
                    PermutationMap::from_sources(perm.sources().to_vec()).map_err(err)?;
                    ensure!(perm.size() == (modulus * modulus) as usize, "perm size");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} (p, q, n, N) cases agree with the naive product"
    ))
}

fn c5_chen_sanity() -> Outcome {
    let p = ChenParams::new(28.0).map_err(err)?;
    let cfg = IntegratorConfig {
        dt: 0.001,
        transient: 0,
    };
    let traj = integrate_chen(ChenState::default(), &p, 10_000, &cfg).map_err(err)?;
    ensure!(
        traj.iter().all(|s| *s == ChenState::default()),
        "origin drifted"
    );

    let mut worst: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let x = sign * 63f64.sqrt();
        let d = chen_derivative(ChenState::new(x, x, 21.0), &p).norm();
        ensure!(d < 1e-9, "equilibrium derivative norm {d}");
        worst = worst.max(d);
    }

    let start = ChenState::new(1.0, 1.0, 1.0);
    let coarse = integrate_chen(
        start,
        &p,
        100,
        &IntegratorConfig {
            dt: 0.001,
            transient: 0,
        },
    )
    .map_err(err)?;
    let fine = integrate_chen(
        start,
        &p,
        200,
        &IntegratorConfig {
            dt: 0.0005,
            transient: 0,
        },
    )
    .map_err(err)?;
    let (a, b) = (coarse.last().unwrap(), fine.last().unwrap());
    let gap = (a.x - b.x)
        .abs()
        .max((a.y - b.y).abs())
        .max((a.z - b.z).abs());
    ensure!(gap < 1e-6, "step-halving gap {gap:e}");
    Ok(format!(
        "origin fixed for 1e4 steps; |f(eq)| = {worst:.1e}; step-halving gap {gap:.1e}"
    ))
}

fn c6_keystream_reuse() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC0FF_EE06);
    for trial in 0..100 {
        let side = rng.gen_range(2..=24);
        let key = random_key(&mut rng);
        let (perm, _) = key_parts(&key, side).map_err(err)?;
        let (p1, p2) = (random_grid(&mut rng, side), random_grid(&mut rng, side));
        let c1 = encrypt(&p1, &key).map_err(err)?;
        let c2 = encrypt(&p2, &key).map_err(err)?;
        let lhs = c1.xor_bytes(c2.as_bytes()).map_err(err)?;
        let s1 = shuffle(&p1, &perm).map_err(err)?;
        let s2 = shuffle(&p2, &perm).map_err(err)?;
        let rhs = s1.xor_bytes(s2.as_bytes()).map_err(err)?;
        ensure!(lhs == rhs, "trial {trial}: keystream did not cancel");
    }
    Ok("C1 xor C2 = S1 xor S2 in 100 trials".into())
}

struct RunningServer {
    addr: SocketAddr,
    stop: ShutdownHandle,
    thread: JoinHandle<std::io::Result<()>>,
}

fn spawn_server(key: SecretKey) -> Result<RunningServer, String> {
    let server = OracleServer::bind("127.0.0.1:0", EncryptionMachine::Keyed(key)).map_err(err)?;
    let addr = server.local_addr().map_err(err)?;
    let stop = server.shutdown_handle().map_err(err)?;
    let thread = std::thread::spawn(move || server.run());
    Ok(RunningServer { addr, stop, thread })
}

fn c7_transport_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC0FF_EE07);
    for scenario in 0..20 {
        let key = random_key(&mut rng);
        let plain = random_grid(&mut rng, 32);
        let cipher = encrypt(&plain, &key).map_err(err)?;
        let server = spawn_server(key.clone())?;

        let local: AttackTranscript =
            full_attack(&mut OracleHandle::in_process(key), &cipher).map_err(err)?;
        let remote = {
            let mut handle = OracleHandle::connect(server.addr).map_err(err)?;
            full_attack(&mut handle, &cipher).map_err(err)?
        };
        server.stop.shutdown();
        server
            .thread
            .join()
            .map_err(|_| "server panicked".to_string())?
            .map_err(err)?;

        ensure!(local == remote, "scenario {scenario}: transcripts differ");
        ensure!(
            remote.recovered_plaintext == plain,
            "scenario {scenario}: wrong plaintext"
        );
    }
    Ok("20 scenarios at N=32: identical transcripts over TCP and in-process".into())
}

fn c8_pgm() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC0FF_EE08);
    for _ in 0..200 {
        let side = rng.gen_range(2..=40);
        let g = random_grid(&mut rng, side);
        let back = decode_pgm(&encode_pgm(&g)).map_err(err)?;
        ensure!(back == g, "round-trip failed at N={side}");
    }
    let good = encode_pgm(&vectors::plain());

    let mut bad_magic = good.clone();
    bad_magic[1] = b'2';
    ensure!(
        matches!(decode_pgm(&bad_magic), Err(PgmError::BadMagic(_))),
        "bad magic not detected"
    );

    let mut bad_maxval = b"P5\n4 4\n15\n".to_vec();
    bad_maxval.extend_from_slice(vectors::plain().as_bytes());
    ensure!(
        matches!(decode_pgm(&bad_maxval), Err(PgmError::BadMaxval(15))),
        "bad maxval not detected"
    );

    let truncated = &good[..good.len() - 1];
    ensure!(
        matches!(
            decode_pgm(truncated),
            Err(PgmError::TruncatedRaster {
                expected: 16,
                found: 15
            })
        ),
        "truncation not detected"
    );
    Ok("200 round-trips; bad magic, bad maxval, truncated raster each distinct".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "1 worked 4x4 example, byte-exact",
            c1_worked_example,
            Some(Duration::from_secs(1)),
        ),
        (
            "2 two plaintext/ciphertext couples",
            c2_two_couples,
            Some(Duration::from_secs(10)),
        ),
        (
            "3 end-to-end attack, 500 trials",
            c3_end_to_end,
            Some(Duration::from_secs(60)),
        ),
        ("4 cat map algebra", c4_cat_map_algebra, None),
        ("5 Chen integration sanity", c5_chen_sanity, None),
        ("6 keystream reuse leak", c6_keystream_reuse, None),
        (
            "7 TCP / in-process equivalence",
            c7_transport_equivalence,
            Some(Duration::from_secs(10)),
        ),
        ("8 PGM round-trip and malformed files", c8_pgm, None),
    ];

    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:?}, limit {limit:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {name}: {why} ({elapsed:.2?})");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
