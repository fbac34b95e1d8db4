use std::time::Duration;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spots_core::Pn;
use spots_transport::{
    connect, decode, encode, in_process, Endpoint, Incoming, Job, Message, Num, Status, MAX_DELTA,
};

fn num() -> impl Strategy<Value = Num> {
    prop_oneof![
        1 => Just(Num(Pn::INF)),
        4 => (0..=Pn::MAX_FINITE).prop_map(|v| Num(Pn::new(v))),
    ]
}

fn delta() -> impl Strategy<Value = Vec<(String, u32)>> {
    prop::collection::vec((".{0,12}", any::<u32>()), 0..6)
}

fn message() -> impl Strategy<Value = Message> {
    prop_oneof![
        (any::<u32>(), any::<u32>(), any::<u32>()).prop_map(|(w, g, t)| Message::hello(w, g, t)),
        (any::<u64>(), ".{0,20}", any::<u32>(), 1..1000u64, 1..1000u64, delta()).prop_map(|(job_id, position, nim, a, b, gn_delta)| {
            Message::Assign { job: Job { job_id, position, nim, iterations: a.max(b), updates: a.min(b), gn_delta } }
        }),
        (any::<u64>(), num(), num(), any::<u64>(), delta()).prop_map(|(job_id, pn, dn, iterations_done, gn_delta)| {
            Message::Progress { job_id, pn, dn, iterations_done, gn_delta }
        }),
        (
            any::<u64>(),
            prop_oneof![Just(Status::Proved), Just(Status::Disproved), Just(Status::BudgetExhausted), Just(Status::Stopped)],
            num(),
            num(),
            any::<u64>(),
            prop::collection::vec((".{0,8}", any::<u32>(), num(), num()), 0..5),
            delta()
        )
            .prop_map(|(job_id, status, pn, dn, iterations_done, children, gn_delta)| Message::Done {
                job_id,
                status,
                pn,
                dn,
                iterations_done,
                children,
                gn_delta
            }),
        delta().prop_map(|gn_delta| Message::Sync { gn_delta }),
        Just(Message::Shutdown {}),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn round_trip(m in message()) {
        let f = encode(&m);
        prop_assert_eq!(f.iter().filter(|&&b| b == b'\n').count(), 1);
        prop_assert_eq!(decode(&f).unwrap(), m);
    }
}

#[test]
fn fuzzed_input_never_panics() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let seeds: Vec<Vec<u8>> = [
        Message::hello(1, 0, 2),
        Message::Shutdown {},
        Message::Progress { job_id: 1, pn: Num(Pn::INF), dn: Num(Pn::new(4)), iterations_done: 9, gn_delta: vec![("0*2".into(), 0)] },
        Message::Assign { job: Job { job_id: 2, position: "0*3".into(), nim: 1, iterations: 10, updates: 2, gn_delta: vec![] } },
    ]
    .iter()
    .map(encode)
    .collect();
    let mut accepted = 0;
    for i in 0..100_000 {
        let bytes: Vec<u8> = if i % 2 == 0 {
            let len = rng.gen_range(0..64);
            (0..len).map(|_| rng.gen()).collect()
        } else {
            // mutate a valid frame
            let mut f = seeds[rng.gen_range(0..seeds.len())].clone();
            for _ in 0..rng.gen_range(1..4) {
                let at = rng.gen_range(0..f.len());
                match rng.gen_range(0..3) {
                    0 => f[at] = rng.gen(),
                    1 => {
                        f.remove(at);
                    }
                    _ => f.truncate(at),
                }
                if f.is_empty() {
                    break;
                }
            }
            f
        };
        if let Ok(m) = decode(&bytes) {
            accepted += 1;
            assert_eq!(decode(&encode(&m)).unwrap(), m);
        }
    }
    assert!(accepted < 100_000);
}

#[test]
fn oversized_delta_is_rejected() {
    let m = Message::Sync { gn_delta: (0..=MAX_DELTA).map(|i| (i.to_string(), 1)).collect() };
    assert!(decode(&encode(&m)).is_err());
}

#[test]
fn in_process_links() {
    let (master, workers) = in_process(2);
    workers[1].send(&Message::hello(7, 0, 1)).unwrap();
    assert_eq!(master.recv(), Some((1, Incoming::Msg(Message::hello(7, 0, 1)))));
    master.send(0, &Message::Shutdown {}).unwrap();
    assert_eq!(workers[0].recv(), Incoming::Msg(Message::Shutdown {}));
    assert_eq!(workers[0].recv_timeout(Duration::from_millis(10)), None);
    drop(workers);
    let mut closed = vec![master.recv().unwrap().0, master.recv().unwrap().0];
    closed.sort();
    assert_eq!(closed, [0, 1]);
    assert_eq!(master.recv(), None);
}

#[test]
fn master_hangup_closes_worker() {
    let (master, workers) = in_process(1);
    master.close(0);
    assert_eq!(workers[0].recv(), Incoming::Closed);
}

#[test]
fn tcp_links() {
    let ep = Endpoint::bind("127.0.0.1:0").unwrap();
    let addr = ep.local_addr().unwrap();
    let worker = std::thread::spawn(move || {
        let w = connect(addr, 5, Duration::from_millis(20)).unwrap();
        w.send(&Message::hello(3, 1, 2)).unwrap();
        let got = w.recv();
        w.send(&Message::Sync { gn_delta: vec![("1".into(), 1)] }).unwrap();
        got
    });
    let master = ep.accept(1).unwrap();
    assert_eq!(master.recv(), Some((0, Incoming::Msg(Message::hello(3, 1, 2)))));
    master.send(0, &Message::Shutdown {}).unwrap();
    assert_eq!(master.recv(), Some((0, Incoming::Msg(Message::Sync { gn_delta: vec![("1".into(), 1)] }))));
    assert_eq!(worker.join().unwrap(), Incoming::Msg(Message::Shutdown {}));
    assert_eq!(master.recv(), Some((0, Incoming::Closed)));
}

#[test]
fn garbage_on_the_socket_is_a_protocol_error() {
    use std::io::Write;
    let ep = Endpoint::bind("127.0.0.1:0").unwrap();
    let addr = ep.local_addr().unwrap();
    let t = std::thread::spawn(move || {
        let mut s = std::net::TcpStream::connect(addr).unwrap();
        s.write_all(b"{\"type\":\"nope\"}\n{\"type\":\"shut").unwrap();
    });
    let master = ep.accept(1).unwrap();
    t.join().unwrap();
    assert!(matches!(master.recv(), Some((0, Incoming::Error(_)))));
    assert!(matches!(master.recv(), Some((0, Incoming::Error(_)))));
    assert_eq!(master.recv(), Some((0, Incoming::Closed)));
}

#[test]
fn connect_without_master_fails() {
    let ep = Endpoint::bind("127.0.0.1:0").unwrap();
    let addr = ep.local_addr().unwrap();
    drop(ep);
    assert!(connect(addr, 3, Duration::from_millis(5)).is_err());
}
